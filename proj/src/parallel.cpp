#include "pauliflow/parallel.hpp"

namespace pauliflow {

std::size_t hardware_threads()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

} // namespace pauliflow
