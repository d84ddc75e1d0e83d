// SPDX-License-Identifier: Apache-2.0

#include "cfisac/cli.hpp"

int main(int argc, char** argv) { return cfisac::run_cli(argc, argv); }
