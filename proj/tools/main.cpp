#include "econ_cli/app.hpp"

int main(int argc, char** argv) { return econ::cli::run(argc, argv); }
