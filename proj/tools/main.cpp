#include "evalkit/cli/app.hpp"

int main(int argc, char** argv) { return evalkit::cli::run_main(argc, argv); }
