#include <iostream>

#include "blockfi_app/app.hpp"

int main(int argc, char** argv) { return blockfi::app::run_cli(argc, argv, std::cout, std::cerr); }
