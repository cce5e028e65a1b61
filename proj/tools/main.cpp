#include "cli/driver.hpp"

int main(int argc, char** argv) { return urank::cli::main_entry(argc, argv); }
