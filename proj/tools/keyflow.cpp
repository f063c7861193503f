#include "keyflow/cli.hpp"

int main(int argc, char** argv) { return keyflow::cli::run(argc, argv); }
