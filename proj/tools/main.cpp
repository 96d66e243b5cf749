#include "cli.hpp"

int main(int argc, char** argv) { return cdesim::cli::run_app(argc, argv); }
