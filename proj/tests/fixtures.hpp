#ifndef PATHDET_TEST_FIXTURES_HPP
#define PATHDET_TEST_FIXTURES_HPP

#include "pathdet/graph.hpp"

namespace fixtures {

// V0 = {0,2}, V1 = {-1,1,3}, V2 = {0,2}; edges join positions differing by one.
inline pathdet::LayeredDigraph simple_walk()
{
    return pathdet::LayeredDigraph({{0, 2}, {-1, 1, 3}, {0, 2}},
                                   {{{0, 0}, {0, 1}, {1, 1}, {1, 2}}, {{0, 0}, {1, 0}, {1, 1}, {2, 1}}});
}

inline pathdet::BoundaryData indicator_boundary()
{
    pathdet::BoundaryData bd;
    bd.N = 2;
    bd.psi = pathdet::QMatrix::identity(2);
    bd.phi = pathdet::QMatrix::identity(2);
    return bd;
}

} // namespace fixtures

#endif
