#include "qcorr_cli.hpp"

int main(int argc, char** argv) { return qcorr::cli::main(argc, argv); }
