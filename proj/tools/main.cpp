#include "cli.hpp"

int main(int argc, char** argv) { return softrec::cli::run_cli(argc, argv); }
