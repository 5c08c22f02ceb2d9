#include "rdeed/cli.hpp"

int main(int argc, char** argv) { return rdeed::dispatch(argc, argv); }
