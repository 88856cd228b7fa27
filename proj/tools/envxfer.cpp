#include "envxfer/cli/app.hpp"

int main(int argc, char** argv) { return envxfer::cli::run(argc, argv); }
