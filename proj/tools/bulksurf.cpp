#include <iostream>

#include "bulksurf/cli.hpp"

int main(int argc, char** argv) { return bulksurf::cli::run(argc, argv, std::cout, std::cerr); }
