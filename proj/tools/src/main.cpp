#include "slschro_app/commands.hpp"

int main(int argc, char** argv) { return slschro::app::run_cli(argc, argv); }
