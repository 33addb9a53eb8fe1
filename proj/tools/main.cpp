#include "cli.hpp"

int main(int argc, char** argv) { return blw::cli::run(argc, argv); }
