#include "cm2pa/model.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace cm2pa::model {

using machine::Configuration;

Nat chunk_start(Nat i, Nat d) {
    Nat s = d;
    for (Nat k = 0; k < i; ++k) {
        if (s > (std::numeric_limits<Nat>::max() >> 2))
            throw Error("chunk start overflows the index type");
        s <<= 2;
    }
    return s;
}

std::string BitModel::dump() const {
    std::string head;
    if (const auto* g = std::get_if<GrowingLayout>(&layout_)) {
        head = "d=" + std::to_string(g->d) + " layout=growing chunks=" +
               std::to_string(g->n_chunks);
    } else {
        const auto& f = std::get<FixedWidthLayout>(layout_);
        head = "d=" + std::to_string(f.d) + " layout=fixed chunks=" +
               std::to_string(f.n_chunks) + " e=" + std::to_string(f.e);
    }
    std::string bits;
    bits.reserve(bits_.size());
    for (bool b : bits_) bits += b ? '1' : '0';
    return head + "\n" + bits + "\n";
}

namespace {

void write_pattern(std::vector<bool>& bits, Nat at, std::string_view pat) {
    for (std::size_t k = 0; k < pat.size(); ++k) bits[at + k] = pat[k] == '1';
}

void write_ones(std::vector<bool>& bits, Nat from, Nat count) {
    for (Nat k = 0; k < count; ++k) bits[from + k] = true;
}

bool matches(const BitModel& m, Nat at, std::string_view pat) {
    for (std::size_t k = 0; k < pat.size(); ++k)
        if (m.bit(at + k) != (pat[k] == '1')) return false;
    return true;
}

bool end_at(const BitModel& m, Nat r) { return m.bit(r) == 1 && m.bit(r + 1) == 0; }

// The unique r in [lo, hi) with bit(r)=1, bit(r+1)=0.
Nat unique_end(const BitModel& m, Nat lo, Nat hi, const std::string& what) {
    std::vector<Nat> found;
    for (Nat r = lo; r < hi; ++r)
        if (end_at(m, r)) found.push_back(r);
    if (found.empty())
        throw MalformedModel("no end marker in " + what);
    if (found.size() > 1)
        throw MalformedModel("two end markers in " + what + " (" +
                             std::to_string(found[0]) + ", " + std::to_string(found[1]) + ")");
    return found.front();
}

} // namespace

BitModel build_canonical(std::span<const Configuration> configs, Nat d) {
    const Nat n = configs.size();
    if (n == 0)
        return BitModel(std::vector<bool>(6, false), GrowingLayout{d, 0});

    const Nat L = chunk_start(n, d) + 6;
    std::vector<bool> bits(L, false);
    for (Nat i = 0; i < n; ++i) {
        const Configuration& c = configs[i];
        const Nat s = chunk_start(i, d);
        if (c.line + 6 > s)
            throw CapacityError("line " + std::to_string(c.line) +
                                " does not fit chunk " + std::to_string(i));
        if (c.c1 + 4 > s || c.c2 + 4 > s)
            throw CapacityError("counter value does not fit chunk " + std::to_string(i));
        write_pattern(bits, s, "001011");
        write_ones(bits, s + 6, c.line);
        write_pattern(bits, 2 * s, "0011");
        write_ones(bits, 2 * s + 4, c.c1);
        write_pattern(bits, 3 * s, "0011");
        write_ones(bits, 3 * s + 4, c.c2);
    }
    write_pattern(bits, chunk_start(n, d), "001011");
    return BitModel(std::move(bits), GrowingLayout{d, n});
}

BitModel build_fixed_width(std::span<const Configuration> configs, Nat d_val,
                           std::size_t K) {
    if (configs.empty())
        throw Error("fixed-width model needs at least one configuration");
    if (configs.back().line != K)
        throw Error("fixed-width run must end on line K");
    const Nat n = configs.size();
    const Nat e = 3 * d_val * (n - 1);
    const Nat L = 3 * d_val * n;
    std::vector<bool> bits(L, false);
    for (Nat i = 0; i < n; ++i) {
        const Configuration& c = configs[i];
        const Nat s = 3 * d_val * i;
        if (c.line + 6 > d_val || c.c1 + 4 > d_val || c.c2 + 4 > d_val)
            throw CapacityError("value does not fit fixed-width chunk " + std::to_string(i));
        write_pattern(bits, s, "001011");
        write_ones(bits, s + 6, c.line);
        write_pattern(bits, s + d_val, "0011");
        write_ones(bits, s + d_val + 4, c.c1);
        write_pattern(bits, s + 2 * d_val, "0011");
        write_ones(bits, s + 2 * d_val + 4, c.c2);
    }
    return BitModel(std::move(bits), FixedWidthLayout{d_val, n, e});
}

std::vector<Configuration> decode(const BitModel& m) {
    std::vector<Configuration> out;
    if (const auto* g = std::get_if<GrowingLayout>(&m.layout())) {
        for (Nat i = 0; i < g->n_chunks; ++i) {
            const Nat s = chunk_start(i, g->d);
            if (!matches(m, s, "001011"))
                throw MalformedModel("missing chunk delimiter at " + std::to_string(s));
            if (!matches(m, 2 * s, "0011") || !matches(m, 3 * s, "0011"))
                throw MalformedModel("missing subchunk break in chunk " + std::to_string(i));
            Configuration c;
            c.line = unique_end(m, s + 5, 2 * s, "line subchunk " + std::to_string(i)) - (s + 5);
            c.c1 = unique_end(m, 2 * s + 3, 3 * s, "c1 subchunk " + std::to_string(i)) - (2 * s + 3);
            c.c2 = unique_end(m, 3 * s + 3, 4 * s, "c2 subchunk " + std::to_string(i)) - (3 * s + 3);
            out.push_back(c);
        }
        return out;
    }
    const auto& f = std::get<FixedWidthLayout>(m.layout());
    for (Nat i = 0; i < f.n_chunks; ++i) {
        const Nat s = 3 * f.d * i;
        if (!matches(m, s, "001011"))
            throw MalformedModel("missing chunk delimiter at " + std::to_string(s));
        if (!matches(m, s + f.d, "0011") || !matches(m, s + 2 * f.d, "0011"))
            throw MalformedModel("missing subchunk break in chunk " + std::to_string(i));
        Configuration c;
        c.line = unique_end(m, s + 5, s + f.d, "line subchunk " + std::to_string(i)) - (s + 5);
        c.c1 = unique_end(m, s + f.d + 3, s + 2 * f.d, "c1 subchunk " + std::to_string(i)) -
               (s + f.d + 3);
        c.c2 = unique_end(m, s + 2 * f.d + 3, s + 3 * f.d, "c2 subchunk " + std::to_string(i)) -
               (s + 2 * f.d + 3);
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> layout_observations(const BitModel& m) {
    std::vector<std::string> problems;
    auto complain = [&](const std::string& s) { problems.push_back(s); };

    if (const auto* g = std::get_if<GrowingLayout>(&m.layout())) {
        const Nat L = m.length();
        std::set<Nat> chunk_starts, break_positions, start_positions;
        for (Nat i = 0; i < g->n_chunks; ++i) {
            const Nat s = chunk_start(i, g->d);
            chunk_starts.insert(s);
            break_positions.insert(2 * s);
            break_positions.insert(3 * s);
            start_positions.insert(s + 1);
            start_positions.insert(s + 3);
            start_positions.insert(2 * s + 1);
            start_positions.insert(3 * s + 1);
        }
        // The bare final delimiter also carries chunk/start patterns.
        const Nat sn = chunk_start(g->n_chunks, g->d);
        std::set<Nat> chunk_starts_scan = chunk_starts;
        if (g->n_chunks > 0) chunk_starts_scan.insert(sn);
        std::set<Nat> start_scan = start_positions;
        if (g->n_chunks > 0) {
            start_scan.insert(sn + 1);
            start_scan.insert(sn + 3);
        }

        for (Nat r = 0; r + 6 <= L; ++r) { // (a)
            bool holds = matches(m, r, "001011");
            bool expected = chunk_starts_scan.count(r) > 0;
            if (holds != expected)
                complain("chunk pattern at " + std::to_string(r) +
                         (holds ? " unexpected" : " missing"));
        }
        for (Nat r = 0; r + 4 <= L; ++r) { // (b)
            bool holds = matches(m, r, "0011");
            bool expected = break_positions.count(r) > 0;
            if (holds != expected)
                complain("break pattern at " + std::to_string(r) +
                         (holds ? " unexpected" : " missing"));
        }
        for (Nat r = 0; r + 2 <= L; ++r) { // (c)
            bool holds = m.bit(r) == 0 && m.bit(r + 1) == 1;
            bool expected = start_scan.count(r) > 0;
            if (holds != expected)
                complain("start pattern at " + std::to_string(r) +
                         (holds ? " unexpected" : " missing"));
        }
        for (Nat i = 0; i < g->n_chunks; ++i) { // (d)-(g)
            const Nat s = chunk_start(i, g->d);
            const struct {
                Nat lo, hi;
                const char* name;
            } ivs[3] = {{s + 5, 2 * s, "line"},
                        {2 * s + 3, 3 * s, "c1"},
                        {3 * s + 3, 4 * s, "c2"}};
            for (const auto& iv : ivs) {
                Nat count = 0;
                for (Nat r = iv.lo; r < iv.hi; ++r)
                    if (end_at(m, r)) ++count;
                if (count != 1)
                    complain(std::string(iv.name) + " subchunk of chunk " +
                             std::to_string(i) + " has " + std::to_string(count) +
                             " end markers");
            }
        }
        return problems;
    }

    const auto& f = std::get<FixedWidthLayout>(m.layout());
    for (Nat i = 0; i < f.n_chunks; ++i) {
        const Nat s = 3 * f.d * i;
        if (!matches(m, s, "001011"))
            complain("missing chunk delimiter at " + std::to_string(s));
        const struct {
            Nat lo, hi;
            const char* name;
        } ivs[3] = {{s + 5, s + f.d, "line"},
                    {s + f.d + 3, s + 2 * f.d, "c1"},
                    {s + 2 * f.d + 3, s + 3 * f.d, "c2"}};
        for (const auto& iv : ivs) {
            Nat count = 0;
            for (Nat r = iv.lo; r < iv.hi; ++r)
                if (end_at(m, r)) ++count;
            if (count != 1)
                complain(std::string(iv.name) + " subchunk of chunk " + std::to_string(i) +
                         " has " + std::to_string(count) + " end markers");
        }
    }
    for (Nat r = f.e + 3 * f.d + 6; r < m.length(); ++r)
        if (m.bit(r)) complain("nonzero bit past the final chunk at " + std::to_string(r));
    return problems;
}

} // namespace cm2pa::model
