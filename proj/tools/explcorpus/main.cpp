#include "explcorpus/cli.hpp"

int main(int argc, char** argv) {
    auto env = explcorpus::cli::Environment::process();
    return explcorpus::cli::dispatch({argv + 1, argv + argc}, env);
}
