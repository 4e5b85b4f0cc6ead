#include "afmass/cli.hpp"

int main(int argc, char** argv) { return afmass::cli::run(argc, argv); }
