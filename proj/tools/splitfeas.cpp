#include "splitfeas/cli.hpp"

int main(int argc, char** argv) { return splitfeas::cli::run_main(argc, argv); }
