#include "app.hpp"

int main(int argc, char** argv) { return meanfield::cli::main_entry(argc, argv); }
