#include "pyrgnn_cli.hpp"

int main(int argc, char** argv) { return pyrgnn::cli::run(argc, argv); }
