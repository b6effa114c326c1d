#include "irstt/cli.hpp"

int main(int argc, char** argv)
{
    return irstt::cli_main(argc, argv);
}
