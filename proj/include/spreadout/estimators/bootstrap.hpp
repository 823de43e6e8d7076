#pragma once

#include <algorithm>
#include <vector>

#include "spreadout/estimators/basic.hpp"

namespace spreadout {

/// One checked instance of a bootstrap bound: measured value, the bound it
/// must stay below, and the slack (bound - value).
struct BoundCheck {
    double value = 0;
    double std_error = 0;
    double bound = 0;
    double slack() const { return bound - value; }
    bool passed() const { return value < bound; }
};

struct BootstrapReport {
    // l1 side: psi_beta(H_n) < C / L for each requested n.
    std::vector<int> half_space_shifts;
    std::vector<BoundCheck> l1_checks;
    // l-infinity side: P[0 <->^H x] < (C / L^d) (L / (L ∨ |x1|))^{d-1}.
    std::vector<Point> targets;
    std::vector<BoundCheck> linf_checks;
    bool l1_passed = true;
    bool linf_passed = true;
    bool passed() const { return l1_passed && linf_passed; }
};

/// Checks the two bootstrap quantities against their target bounds with a
/// given constant C. The half-space for the l-infinity checks is H_0
/// (x1 >= 0) with the origin on its boundary.
inline BootstrapReport bootstrap_check(const SpreadOutModel& m, double C,
                                       const std::vector<int>& shifts,
                                       const std::vector<Point>& targets, const MCOptions& opt,
                                       const RngStream& stream) {
    BootstrapReport rep;
    rep.half_space_shifts = shifts;
    rep.targets = targets;
    double L = static_cast<double>(m.L);

    for (size_t i = 0; i < shifts.size(); ++i) {
        Estimate e = psi_mc(m, shifts[i], opt, stream.child(i));
        BoundCheck bc{e.value, e.std_error, C / L};
        rep.l1_passed = rep.l1_passed && bc.passed();
        rep.l1_checks.push_back(bc);
    }

    if (!targets.empty()) {
        auto est = two_point_mc_multi(m, HalfSpace{0}, Point::zero(m.d), targets, opt,
                                      stream.child(1000));
        for (size_t i = 0; i < targets.size(); ++i) {
            double x1 = std::abs(static_cast<double>(targets[i][0]));
            double denom = std::max(L, x1);
            double bound = (C / std::pow(L, m.d)) * std::pow(L / denom, m.d - 1);
            BoundCheck bc{est[i].value, est[i].std_error, bound};
            rep.linf_passed = rep.linf_passed && bc.passed();
            rep.linf_checks.push_back(bc);
        }
    }
    return rep;
}

}  // namespace spreadout
