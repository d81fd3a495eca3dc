#include "lep/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "lep/core.hpp"
#include "lep/dynamics.hpp"

namespace lep {

std::string format_real(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc())
        throw Error("failed to format number");
    return std::string(buf.data(), res.ptr);
}

double parse_real(std::string_view s)
{
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw InvalidArgument("not a number: '" + std::string(s) + "'");
    return v;
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name)
            return k;
    throw InvalidArgument("CSV has no column '" + std::string(name) + "'");
}

double CsvTable::real(std::size_t row, std::string_view name) const { return parse_real(rows.at(row)[column(name)]); }

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

CsvTable read_csv(std::istream& is)
{
    CsvTable t;
    std::string line;
    if (!std::getline(is, line))
        throw InvalidArgument("empty CSV");
    t.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        auto row = split(line);
        if (row.size() != t.header.size())
            throw InvalidArgument("CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                                  " fields, expected " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable read_csv_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return read_csv(in);
}

void write_text_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << contents;
    if (!out)
        throw Error("write failed for " + path.string());
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const auto plus = make_psi_plus();
    const auto minus = make_psi_minus();
    os << "t_us,rho_ee,re_rho_eg,im_rho_eg,rho_gg,delta,gamma,fidelity_plus,fidelity_minus\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto rho = traj.state(k);
        os << format_real(traj.times[k]) << ',' << format_real(rho.rho_ee) << ',' << format_real(rho.rho_eg.real())
           << ',' << format_real(rho.rho_eg.imag()) << ',' << format_real(rho.rho_gg) << ','
           << format_real(traj.params[k].delta) << ',' << format_real(traj.params[k].gamma) << ','
           << format_real(fidelity(rho, plus)) << ',' << format_real(fidelity(rho, minus)) << '\n';
    }
}

} // namespace lep
