#include <iostream>

#include "driver.hpp"

int main(int argc, char** argv) { return czx::cli::main_entry(argc, argv, std::cout, std::cerr); }
