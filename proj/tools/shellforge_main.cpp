#include "shellforge/cli.hpp"

int main(int argc, char** argv) { return shellforge::dispatch(argc, argv); }
