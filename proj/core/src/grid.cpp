#include "subeq/grid.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace subeq {

Grid Grid::make(const Box& box, const std::vector<int>& dims, const DomainSpec& domain) {
    Grid g;
    g.box = box;
    g.dims = dims;
    const int n = int(dims.size());
    if (box.dim() != n) throw InvalidArgument("Grid: box and dims dimensions differ");
    g.h = Eigen::VectorXd(n);
    long total = 1;
    for (int i = 0; i < n; ++i) {
        if (dims[i] < 2) throw InvalidArgument("Grid: need at least 2 nodes per axis");
        g.h[i] = (box.hi[i] - box.lo[i]) / double(dims[i] - 1);
        total *= dims[i];
    }
    g.strides_.assign(n, 1);
    for (int i = n - 2; i >= 0; --i) g.strides_[i] = g.strides_[i + 1] * dims[i + 1];
    g.mask.assign(total, NodeClass::Exterior);

    std::vector<int> idx(n, 0);
    for (long f = 0; f < total; ++f) {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = box.lo[i] + g.h[i] * idx[i];
        bool inside = domain(x) < 0.0;
        bool stencil_ok = true;
        for (int i = 0; i < n; ++i)
            if (idx[i] == 0 || idx[i] == dims[i] - 1) stencil_ok = false;
        if (inside && stencil_ok) {
            g.mask[f] = NodeClass::Interior;
            g.interior.push_back(f);
        }
        // lexicographic increment
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[i] < dims[i]) break;
            idx[i] = 0;
        }
    }
    // Boundary pass: non-interior nodes 3^n-adjacent to an interior node.
    for (long f = 0; f < total; ++f) {
        if (g.mask[f] == NodeClass::Interior) continue;
        std::vector<int> id = g.unflat(f);
        bool adj = false;
        std::vector<int> off(n, -1);
        while (!adj) {
            std::vector<int> nb = id;
            bool ok = true;
            for (int i = 0; i < n; ++i) {
                nb[i] += off[i];
                if (nb[i] < 0 || nb[i] >= dims[i]) ok = false;
            }
            if (ok && g.mask[g.flat(nb)] == NodeClass::Interior) adj = true;
            int i = n - 1;
            for (; i >= 0; --i) {
                if (++off[i] <= 1) break;
                off[i] = -1;
            }
            if (i < 0) break;
        }
        if (adj) {
            g.mask[f] = NodeClass::Boundary;
            g.boundary.push_back(f);
        }
    }
    return g;
}

long Grid::flat(const std::vector<int>& idx) const {
    long f = 0;
    for (size_t i = 0; i < idx.size(); ++i) f += strides_[i] * idx[i];
    return f;
}

std::vector<int> Grid::unflat(long f) const {
    std::vector<int> idx(dims.size());
    for (size_t i = 0; i < dims.size(); ++i) {
        idx[i] = int(f / strides_[i]);
        f %= strides_[i];
    }
    return idx;
}

Eigen::VectorXd Grid::coords(long f) const {
    std::vector<int> idx = unflat(f);
    Eigen::VectorXd x(dim());
    for (int i = 0; i < dim(); ++i) x[i] = box.lo[i] + h[i] * idx[i];
    return x;
}

GridFunction GridFunction::from(const Grid& g,
                                const std::function<double(const Eigen::VectorXd&)>& f) {
    GridFunction u = zeros(g);
    for (long i = 0; i < g.size(); ++i) u.values[i] = f(g.coords(i));
    return u;
}

namespace {

std::string join_x(const Eigen::VectorXd& v) {
    std::string out;
    char buf[40];
    for (int i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        if (i) out += "x";
        out += buf;
    }
    return out;
}

}  // namespace

void write_grid_csv(const std::string& path, const GridFunction& u) {
    const Grid& g = *u.grid;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << "dims,h,origin\n";
    std::string dims;
    for (size_t i = 0; i < g.dims.size(); ++i)
        dims += (i ? "x" : "") + std::to_string(g.dims[i]);
    out << dims << "," << join_x(g.h) << "," << join_x(g.box.lo) << "\n";
    const int last = g.dims.back();
    char buf[40];
    for (long i = 0; i < g.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", u.values[i]);
        out << buf;
        out << (((i + 1) % last == 0) ? "\n" : ",");
    }
}

GridFunction read_grid_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != "dims,h,origin")
        throw ConfigError("grid csv: bad header in '" + path + "'");
    if (!std::getline(in, line)) throw ConfigError("grid csv: missing shape line");
    GridFunction u = GridFunction::zeros(g);
    long i = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell.empty()) continue;
            if (i >= g.size()) throw ConfigError("grid csv: too many values");
            u.values[i++] = std::stod(cell);
        }
    }
    if (i != g.size()) throw ConfigError("grid csv: wrong value count");
    return u;
}

}  // namespace subeq
