#include "neqt/cli.hpp"

int main(int argc, char** argv) { return neqt::cli::dispatch(argc, argv); }
