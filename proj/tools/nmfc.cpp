#include "nmfc/cli.hpp"

int main(int argc, char** argv) { return nmfc::cli::run(argc, argv); }
