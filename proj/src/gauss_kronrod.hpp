#pragma once

// Globally adaptive 7-point Gauss / 15-point Kronrod quadrature with the
// QUADPACK qk15 error estimate. The panel with the largest error estimate is
// bisected until the summed estimate meets the tolerance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace plap::detail {

struct GkPanel {
    double a;
    double b;
    double result;
    double error;

    bool operator<(const GkPanel& o) const { return error < o.error; }
};

template <class F>
GkPanel gk15(const F& f, double a, double b)
{
    static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
        const double sum = fv1[j] + fv2[j];
        resk += wgk[j] * sum;
        resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * sum;
    }
    const double reskh = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double scale = std::abs(half);
    resk *= half;
    resg *= half;
    resabs *= scale;
    resasc *= scale;
    double err = std::abs(resk - resg);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    err = std::max(err, 4.0 * std::numeric_limits<double>::epsilon() * resabs);
    return {a, b, resk, err};
}

template <class F>
double integrate_gk(const F& f, double a, double b, double rel_tol = 1e-14, double abs_tol = 0.0,
                    int max_panels = 400)
{
    if (a == b) return 0.0;
    std::priority_queue<GkPanel> panels;
    GkPanel first = gk15(f, a, b);
    double total = first.result;
    double error = first.error;
    panels.push(first);
    while (error > std::max(abs_tol, rel_tol * std::abs(total)) && static_cast<int>(panels.size()) < max_panels) {
        const GkPanel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
        panels.pop();
        const GkPanel left = gk15(f, worst.a, mid);
        const GkPanel right = gk15(f, mid, worst.b);
        total += left.result + right.result - worst.result;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // re-sum to avoid drift from the incremental updates
    double sum = 0.0;
    while (!panels.empty()) {
        sum += panels.top().result;
        panels.pop();
    }
    return sum;
}

}  // namespace plap::detail
