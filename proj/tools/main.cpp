#include "actionlab/cli.hpp"

int main(int argc, char** argv) { return actionlab::run_cli(argc, argv); }
