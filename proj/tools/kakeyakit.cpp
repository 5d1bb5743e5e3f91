#include "kakeyakit/runner.hpp"

int main(int argc, char** argv) { return kakeyakit::cli::run(argc, argv); }
