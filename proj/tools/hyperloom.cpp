#include "hyperloom/cli.hpp"

int main(int argc, char** argv) { return hyperloom::cli::dispatch(argc, argv); }
