#include "cli.hpp"

int main(int argc, char** argv) { return radonkit::cli::run(argc, argv); }
