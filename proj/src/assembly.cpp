#include "wgmfem/assembly.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <cstdlib>
#include <thread>

namespace wgmfem {

namespace {

using Triplet = Eigen::Triplet<double, int>;

struct Lists {
    std::vector<Triplet> A, B0, B1, F, G, c, Mp;
};

enum Part : unsigned { PartA = 1, PartB = 2, PartRhs = 4, PartMass = 8, PartPenaltyOnly = 16 };

// Runs body(i, lists) for i in [0, n) in contiguous chunks and concatenates the
// per-chunk lists in index order, so the result does not depend on the thread count.
template <typename Body>
Lists run_chunked(int n, int threads, Body&& body)
{
    threads = std::max(1, std::min(threads, n));
    std::vector<Lists> parts(threads);
    auto work = [&](int t) {
        const int lo = static_cast<int>(static_cast<long long>(n) * t / threads);
        const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / threads);
        for (int i = lo; i < hi; ++i)
            body(i, parts[t]);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    Lists out;
    auto append = [](std::vector<Triplet>& dst, std::vector<Triplet>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
        std::vector<Triplet>().swap(src);
    };
    for (auto& p : parts) {
        append(out.A, p.A);
        append(out.B0, p.B0);
        append(out.B1, p.B1);
        append(out.F, p.F);
        append(out.G, p.G);
        append(out.c, p.c);
        append(out.Mp, p.Mp);
    }
    return out;
}

void scatter(std::vector<Triplet>& out, const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols)
{
    for (int j = 0; j < m.cols(); ++j) {
        if (cols[j] < 0)
            continue;
        for (int i = 0; i < m.rows(); ++i)
            if (rows[i] >= 0 && m(i, j) != 0.0)
                out.emplace_back(rows[i], cols[j], m(i, j));
    }
}

void scatter(std::vector<Triplet>& out, const Eigen::VectorXd& v, const std::vector<int>& rows)
{
    for (int i = 0; i < v.size(); ++i)
        if (rows[i] >= 0 && v[i] != 0.0)
            out.emplace_back(rows[i], 0, v[i]);
}

std::vector<int> range(int start, int n)
{
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i)
        r[i] = start + i;
    return r;
}

SparseMatrix to_sparse(int rows, int cols, const std::vector<Triplet>& t)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::VectorXd to_vector(int n, const std::vector<Triplet>& t)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (const auto& x : t)
        v[x.row()] += x.value();
    return v;
}

} // namespace

int default_threads()
{
    if (const char* s = std::getenv("WG_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0)
            return n;
    }
    return 1;
}

std::vector<InterfaceEdgeData> build_interface_data(const PolyMesh& mesh, const InterfaceCurve& curve, int order)
{
    std::vector<InterfaceEdgeData> out;
    out.reserve(mesh.interface_edges().size());
    for (const auto& ie : mesh.interface_edges()) {
        const Edge& e = mesh.edge(ie.edge);
        InterfaceEdgeData d;
        d.edge = ie.edge;
        d.cell1 = ie.cell1;
        d.cell2 = ie.cell2;
        d.sign = ie.sign;
        d.n_h = ie.sign * e.normal;
        d.h_e = 0.5 * (mesh.cell_diameter(ie.cell1) + mesh.cell_diameter(ie.cell2));
        d.quad = edge_quadrature(mesh.vertex(e.v0), mesh.vertex(e.v1), order);
        d.proj.reserve(d.quad.size());
        for (const auto& x : d.quad.points)
            d.proj.push_back(project_to_interface(x, curve));
        out.push_back(std::move(d));
    }
    return out;
}

SparseMatrix SaddleSystem::unconstrained_matrix() const
{
    std::vector<Triplet> t;
    t.reserve(A.nonZeros() + B1.nonZeros() + B0.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < B1.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(B1, k); it; ++it)
            t.emplace_back(it.col(), n_u() + it.row(), it.value());
    for (int k = 0; k < B0.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(B0, k); it; ++it)
            t.emplace_back(n_u() + it.row(), it.col(), it.value());
    return to_sparse(n_u() + n_p(), n_u() + n_p(), t);
}

SparseMatrix SaddleSystem::matrix() const { return attach_mean_constraint(*this); }

Eigen::VectorXd SaddleSystem::rhs() const
{
    Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
    b.head(n_u()) = F;
    b.segment(n_u(), n_p()) = G;
    return b;
}

SparseMatrix attach_mean_constraint(const SaddleSystem& s)
{
    const SparseMatrix m = s.unconstrained_matrix();
    std::vector<Triplet> t;
    t.reserve(m.nonZeros() + 2 * s.n_p());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            t.emplace_back(it.row(), it.col(), it.value());
    const int last = s.n_u() + s.n_p();
    for (int q = 0; q < s.n_p(); ++q) {
        if (s.c[q] == 0.0)
            continue;
        t.emplace_back(s.n_u() + q, last, s.c[q]);
        t.emplace_back(last, s.n_u() + q, s.c[q]);
    }
    return to_sparse(s.size(), s.size(), t);
}

void dump_system(const SaddleSystem& system, const std::string& path)
{
    if (!Eigen::saveMarket(system.matrix(), path))
        throw Error("cannot write system matrix to " + path);
}

Assembler::Assembler(const PolyMesh& mesh, const InterfaceCurve& curve, const Spaces& spaces, AssemblyOptions options)
    : mesh_(&mesh), curve_(&curve), spaces_(spaces), options_(options), dofs_(mesh, spaces)
{
    if (options_.threads <= 0)
        options_.threads = default_threads();
    iface_ = build_interface_data(mesh, curve, options_.data_order(spaces_.k()));
}

namespace {

struct CellContext {
    const PolyMesh& mesh;
    const WgDofMap& dofs;
    const Spaces& spaces;
    const AssemblyOptions& opt;
};

void cell_kernel(const CellContext& ctx, int c, unsigned parts, const std::array<double, 2>& kappa, const ProblemData* data,
                 Lists& out)
{
    const int k = ctx.spaces.k();
    const CellOperator op(ctx.mesh, c, ctx.spaces, ctx.opt.poly_order(k));
    const auto udofs = ctx.dofs.local_u_dofs(ctx.mesh, c);
    const int na = op.n_alpha(), ns = op.n_sigma(), nb = op.n_beta();
    const auto pdofs = range(ctx.dofs.cell_p_offset(c), ns);
    const Eigen::MatrixXd& W = op.weak_div();
    const Eigen::MatrixXd& Mb = op.mass_beta();

    if (parts & PartA) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(op.local_size(), op.local_size());
        const double kinv = 1.0 / kappa[ctx.mesh.label(c) - 1];
        a.block(0, 0, na, na) = kinv * op.mass_alpha();
        a.block(na, na, na, na) = kinv * op.mass_alpha();
        a.noalias() += W.transpose() * Mb * W;

        const double scale = ctx.opt.rho / ctx.mesh.cell_diameter(c);
        Eigen::VectorXd row(op.local_size()), ma(na), psi(op.n_edge());
        for (int j = 0; j < op.num_edges(); ++j) {
            const Vec2 n = op.outward_normal(j);
            const auto q = op.edge_quadrature_rule(j, ctx.opt.poly_order(k));
            for (std::size_t i = 0; i < q.size(); ++i) {
                op.basis_alpha().eval(q.points[i], ma);
                op.edge_basis(j).eval(q.points[i], psi);
                row.setZero();
                row.segment(0, na) = n.x() * ma;
                row.segment(na, na) = n.y() * ma;
                row.segment(op.edge_offset(j), op.n_edge()) = -op.cell_edge(j).sign * psi;
                a.noalias() += scale * q.weights[i] * row * row.transpose();
            }
        }
        scatter(out.A, a, udofs, udofs);
    }
    if (parts & PartB) {
        const Eigen::MatrixXd b0 = -Mb.leftCols(ns).transpose() * W;
        scatter(out.B0, b0, pdofs, udofs);
        scatter(out.B1, b0, pdofs, udofs);
    }
    if (parts & PartRhs) {
        const int side = ctx.mesh.label(c);
        const auto q = cell_quadrature(ctx.mesh.cell_points(c), ctx.opt.data_order(k));
        Eigen::VectorXd fb = Eigen::VectorXd::Zero(nb), mb(nb);
        for (std::size_t i = 0; i < q.size(); ++i) {
            op.basis_beta().eval(q.points[i], mb);
            fb += q.weights[i] * data->f(side, q.points[i]) * mb;
        }
        scatter(out.F, Eigen::VectorXd(W.transpose() * fb), udofs);
        scatter(out.G, Eigen::VectorXd(-fb.head(ns)), pdofs);
    }
    if (parts & PartMass) {
        scatter(out.c, Eigen::VectorXd(Mb.col(0).head(ns)), pdofs);
        scatter(out.Mp, Eigen::MatrixXd(Mb.topLeftCorner(ns, ns)), pdofs, pdofs);
    }
}

struct InterfaceContext {
    const PolyMesh& mesh;
    const WgDofMap& dofs;
    const Spaces& spaces;
    const AssemblyOptions& opt;
};

// Values of [T^alpha v0] . n for every v0 dof of the two cells (cell 1 first).
Eigen::VectorXd penalty_row(const InterfaceContext& ctx, const ScaledMonomialBasis& b1, const ScaledMonomialBasis& b2,
                            const InterfaceEdgeData& d, std::size_t i)
{
    const int na = b1.dim();
    const Point& x = d.quad.points[i];
    Eigen::VectorXd t1, t2;
    Vec2 n;
    if (ctx.opt.correction) {
        t1 = taylor_basis_values(b1, x, d.proj[i], ctx.spaces.alpha, TaylorVariant::T, ctx.opt.taylor);
        t2 = taylor_basis_values(b2, x, d.proj[i], ctx.spaces.alpha, TaylorVariant::T, ctx.opt.taylor);
        n = d.proj[i].n_tilde;
    } else {
        t1 = b1.eval(x);
        t2 = b2.eval(x);
        n = d.n_h;
    }
    Eigen::VectorXd row(4 * na);
    row << n.x() * t1, n.y() * t1, -n.x() * t2, -n.y() * t2;
    return row;
}

std::vector<int> pair_u_dofs(const WgDofMap& dofs, int c1, int c2)
{
    auto r = range(dofs.cell_u_offset(c1), 2 * dofs.n_alpha());
    const auto r2 = range(dofs.cell_u_offset(c2), 2 * dofs.n_alpha());
    r.insert(r.end(), r2.begin(), r2.end());
    return r;
}

void interface_kernel(const InterfaceContext& ctx, const InterfaceEdgeData& d, unsigned parts, const ProblemData* data,
                      Lists& out)
{
    const PolyMesh& mesh = ctx.mesh;
    const Spaces& sp = ctx.spaces;
    const ScaledMonomialBasis a1(mesh.cell_centroid(d.cell1), mesh.cell_diameter(d.cell1), sp.alpha);
    const ScaledMonomialBasis a2(mesh.cell_centroid(d.cell2), mesh.cell_diameter(d.cell2), sp.alpha);
    const Edge& e = mesh.edge(d.edge);
    const EdgeBasis eb(mesh.vertex(e.v0), mesh.vertex(e.v1), sp.beta);
    const int ne = eb.dim();
    const auto u12 = pair_u_dofs(ctx.dofs, d.cell1, d.cell2);
    auto vb = range(ctx.dofs.edge_block(d.edge, 1), ne);
    const auto vb2 = range(ctx.dofs.edge_block(d.edge, 2), ne);
    vb.insert(vb.end(), vb2.begin(), vb2.end());
    const double pen = ctx.opt.eta / d.h_e;

    if (parts & (PartA | PartPenaltyOnly)) {
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(u12.size(), u12.size());
        for (std::size_t i = 0; i < d.quad.size(); ++i) {
            const auto row = penalty_row(ctx, a1, a2, d, i);
            p.noalias() += pen * d.quad.weights[i] * row * row.transpose();
        }
        scatter(out.A, p, u12, u12);
    }
    if (parts & PartB) {
        const ScaledMonomialBasis s1(mesh.cell_centroid(d.cell1), mesh.cell_diameter(d.cell1), sp.sigma);
        const ScaledMonomialBasis s2(mesh.cell_centroid(d.cell2), mesh.cell_diameter(d.cell2), sp.sigma);
        const int ns = s1.dim();
        auto q12 = range(ctx.dofs.cell_p_offset(d.cell1), ns);
        const auto q2r = range(ctx.dofs.cell_p_offset(d.cell2), ns);
        q12.insert(q12.end(), q2r.begin(), q2r.end());
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * ns, 2 * ne);
        for (std::size_t i = 0; i < d.quad.size(); ++i) {
            const Point& x = d.quad.points[i];
            const Eigen::VectorXd psi = eb.eval(x);
            Eigen::VectorXd avg(2 * ns), jump_t1(2 * ns);
            avg << 0.5 * s1.eval(x), 0.5 * s2.eval(x);
            if (ctx.opt.correction) {
                jump_t1 << taylor_basis_values(s1, x, d.proj[i], sp.sigma, TaylorVariant::T1, ctx.opt.taylor),
                    -taylor_basis_values(s2, x, d.proj[i], sp.sigma, TaylorVariant::T1, ctx.opt.taylor);
            } else {
                jump_t1.setZero();
            }
            // [v_b . n_h] = s (v1 - v2), {v_b . n_h} = s (v1 + v2) / 2.
            Eigen::VectorXd jump_v(2 * ne), avg_v(2 * ne);
            jump_v << d.sign * psi, -d.sign * psi;
            avg_v << 0.5 * d.sign * psi, 0.5 * d.sign * psi;
            b.noalias() += d.quad.weights[i] * (avg * jump_v.transpose() - jump_t1 * avg_v.transpose());
        }
        scatter(out.B1, b, q12, vb);
    }
    if (parts & PartRhs) {
        Eigen::VectorXd fu = Eigen::VectorXd::Zero(u12.size());
        Eigen::VectorXd fb = Eigen::VectorXd::Zero(2 * ne);
        for (std::size_t i = 0; i < d.quad.size(); ++i) {
            const Point& at = ctx.opt.correction ? d.proj[i].foot : d.quad.points[i];
            const double w = d.quad.weights[i];
            fu += pen * w * data->g_N(at) * penalty_row(ctx, a1, a2, d, i);
            const Eigen::VectorXd psi = eb.eval(d.quad.points[i]);
            const double gd = data->g_D(at);
            fb.head(ne) -= w * gd * 0.5 * d.sign * psi;
            fb.tail(ne) -= w * gd * 0.5 * d.sign * psi;
        }
        scatter(out.F, fu, u12);
        scatter(out.F, fb, vb);
    }
}

} // namespace

SparseMatrix Assembler::assemble_a(const std::array<double, 2>& kappa) const
{
    const CellContext cc{*mesh_, dofs_, spaces_, options_};
    const InterfaceContext ic{*mesh_, dofs_, spaces_, options_};
    auto cells = run_chunked(static_cast<int>(mesh_->num_cells()), options_.threads,
                             [&](int c, Lists& l) { cell_kernel(cc, c, PartA, kappa, nullptr, l); });
    auto iface = run_chunked(static_cast<int>(iface_.size()), options_.threads,
                             [&](int i, Lists& l) { interface_kernel(ic, iface_[i], PartA, nullptr, l); });
    cells.A.insert(cells.A.end(), iface.A.begin(), iface.A.end());
    return to_sparse(dofs_.n_u(), dofs_.n_u(), cells.A);
}

SparseMatrix Assembler::assemble_interface_penalty() const
{
    const InterfaceContext ic{*mesh_, dofs_, spaces_, options_};
    auto iface = run_chunked(static_cast<int>(iface_.size()), options_.threads,
                             [&](int i, Lists& l) { interface_kernel(ic, iface_[i], PartPenaltyOnly, nullptr, l); });
    return to_sparse(dofs_.n_u(), dofs_.n_u(), iface.A);
}

std::pair<SparseMatrix, SparseMatrix> Assembler::assemble_b() const
{
    const CellContext cc{*mesh_, dofs_, spaces_, options_};
    const InterfaceContext ic{*mesh_, dofs_, spaces_, options_};
    const std::array<double, 2> unit{1.0, 1.0};
    auto cells = run_chunked(static_cast<int>(mesh_->num_cells()), options_.threads,
                             [&](int c, Lists& l) { cell_kernel(cc, c, PartB, unit, nullptr, l); });
    auto iface = run_chunked(static_cast<int>(iface_.size()), options_.threads,
                             [&](int i, Lists& l) { interface_kernel(ic, iface_[i], PartB, nullptr, l); });
    cells.B1.insert(cells.B1.end(), iface.B1.begin(), iface.B1.end());
    return {to_sparse(dofs_.n_p(), dofs_.n_u(), cells.B1), to_sparse(dofs_.n_p(), dofs_.n_u(), cells.B0)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> Assembler::assemble_rhs(const ProblemData& data) const
{
    const CellContext cc{*mesh_, dofs_, spaces_, options_};
    const InterfaceContext ic{*mesh_, dofs_, spaces_, options_};
    auto cells = run_chunked(static_cast<int>(mesh_->num_cells()), options_.threads,
                             [&](int c, Lists& l) { cell_kernel(cc, c, PartRhs, data.kappa, &data, l); });
    auto iface = run_chunked(static_cast<int>(iface_.size()), options_.threads,
                             [&](int i, Lists& l) { interface_kernel(ic, iface_[i], PartRhs, &data, l); });
    cells.F.insert(cells.F.end(), iface.F.begin(), iface.F.end());
    return {to_vector(dofs_.n_u(), cells.F), to_vector(dofs_.n_p(), cells.G)};
}

std::pair<Eigen::VectorXd, SparseMatrix> Assembler::assemble_pressure_mass() const
{
    const CellContext cc{*mesh_, dofs_, spaces_, options_};
    const std::array<double, 2> unit{1.0, 1.0};
    auto cells = run_chunked(static_cast<int>(mesh_->num_cells()), options_.threads,
                             [&](int c, Lists& l) { cell_kernel(cc, c, PartMass, unit, nullptr, l); });
    return {to_vector(dofs_.n_p(), cells.c), to_sparse(dofs_.n_p(), dofs_.n_p(), cells.Mp)};
}

SaddleSystem Assembler::assemble(const ProblemData& data) const
{
    if (!(data.kappa[0] > 0.0 && data.kappa[1] > 0.0))
        throw Error("assembly: conductivities must be positive");
    const CellContext cc{*mesh_, dofs_, spaces_, options_};
    const InterfaceContext ic{*mesh_, dofs_, spaces_, options_};
    const unsigned all = PartA | PartB | PartRhs | PartMass;
    auto cells = run_chunked(static_cast<int>(mesh_->num_cells()), options_.threads,
                             [&](int c, Lists& l) { cell_kernel(cc, c, all, data.kappa, &data, l); });
    auto iface = run_chunked(static_cast<int>(iface_.size()), options_.threads,
                             [&](int i, Lists& l) { interface_kernel(ic, iface_[i], all, &data, l); });
    SaddleSystem s;
    s.dofs = dofs_;
    cells.A.insert(cells.A.end(), iface.A.begin(), iface.A.end());
    s.A = to_sparse(dofs_.n_u(), dofs_.n_u(), cells.A);
    std::vector<Triplet>().swap(cells.A);
    std::vector<Triplet>().swap(iface.A);
    cells.B1.insert(cells.B1.end(), iface.B1.begin(), iface.B1.end());
    s.B1 = to_sparse(dofs_.n_p(), dofs_.n_u(), cells.B1);
    s.B0 = to_sparse(dofs_.n_p(), dofs_.n_u(), cells.B0);
    cells.F.insert(cells.F.end(), iface.F.begin(), iface.F.end());
    s.F = to_vector(dofs_.n_u(), cells.F);
    s.G = to_vector(dofs_.n_p(), cells.G);
    s.c = to_vector(dofs_.n_p(), cells.c);
    s.Mp = to_sparse(dofs_.n_p(), dofs_.n_p(), cells.Mp);
    return s;
}

} // namespace wgmfem
