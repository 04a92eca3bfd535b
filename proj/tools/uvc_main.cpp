#include "uvc/cli.hpp"

int main(int argc, char** argv) { return uvc::run_cli(argc, argv); }
