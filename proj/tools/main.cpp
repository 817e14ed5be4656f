#include "kd/cli.hpp"

int main(int argc, char** argv) { return kd::cli::run(argc, argv); }
