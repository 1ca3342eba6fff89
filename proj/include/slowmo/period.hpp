#pragma once

#include "slowmo/geometry.hpp"
#include "slowmo/videoio.hpp"

#include <string>
#include <vector>

namespace slowmo {

struct Surrogate {
    Signal1D signal;
    bool degenerate = false;  ///< every point coincident; signal is flat
    bool bridged = false;     ///< the neighbor graph needed bridging edges
    std::vector<std::string> warnings;
};

/// 1-D ISOMAP: symmetric k-NN graph, components joined by their shortest
/// bridging edges, all-pairs Dijkstra, classical MDS onto the top eigenpair.
/// Output is ordered like the input rows and its sign is fixed so that the
/// entry of largest magnitude is positive.
Surrogate isomap_1d(const PointCloud& cloud, int n_neighbors);

/// Normalized square difference function of the mean-removed signal for
/// lags 0 .. max_lag.
std::vector<double> nsdf(const std::vector<double>& x, int max_lag);

struct PeriodEstimate {
    double T = 0.0;
    double confidence = 0.0;
    Signal1D surrogate;
};

/// McLeod-style pitch picking on the NSDF over lags [2, N/2]. Candidates are
/// the maxima of each positive lobe after the first negative-going zero
/// crossing; the earliest candidate at or above 0.6 of the best one wins and
/// is refined by a parabola through its neighbours.
PeriodEstimate estimate_period(const Signal1D& surrogate);

}  // namespace slowmo
