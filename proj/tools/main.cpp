#include "cli.hpp"

int main(int argc, char** argv) { return dtnlab::cli::run(argc, argv); }
