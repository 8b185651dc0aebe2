#include "fclt/cli.hpp"

int main(int argc, char** argv) { return fclt::dispatch(argc, argv); }
