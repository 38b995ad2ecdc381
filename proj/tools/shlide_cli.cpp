#include "shlide/frontend.hpp"

int main(int argc, char** argv) { return shlide::run_cli(argc, argv); }
