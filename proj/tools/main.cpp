#include "pathdet/cli.hpp"

int main(int argc, char** argv)
{
    return pathdet::run(argc, argv);
}
