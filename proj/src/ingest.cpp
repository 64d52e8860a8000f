#include "topsim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace topsim {

namespace {

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

// strict integer parse of a whole (trimmed) token
bool parse_count(const std::string& line, int& out) {
    std::istringstream iss(line);
    std::string tok, extra;
    if (!(iss >> tok)) return false;
    if (iss >> extra) return false;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

bool parse_double(const std::string& tok, double& out) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

const PointCloud& validate_cloud(const PointCloud& cloud) {
    if (cloud.points.empty())
        throw DataError("point cloud is empty");
    if (!cloud.elements.empty() && cloud.elements.size() != cloud.points.size())
        throw DataError("element list length does not match point count");
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        if (!cloud.points[i].allFinite())
            throw DataError("non-finite coordinate at point " + std::to_string(i));
    }
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        for (std::size_t j = i + 1; j < cloud.points.size(); ++j) {
            if ((cloud.points[i] - cloud.points[j]).norm() < kDuplicateTolerance) {
                throw DataError("degenerate input: points " + std::to_string(i) + " and " +
                                std::to_string(j) + " coincide within 1e-9 A");
            }
        }
    }
    return cloud;
}

TrajectorySet parse_xyz(const std::string& content, const std::string& tag) {
    std::istringstream in(content);
    TrajectorySet traj;
    traj.group_label = tag;

    std::string line;
    int lineno = 0;
    int frame_id = 0;
    while (true) {
        // skip blank lines between frames
        int natoms = -1;
        bool got_count = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_blank(line)) continue;
            if (!parse_count(line, natoms) || natoms <= 0)
                throw DataError("xyz parse error at line " + std::to_string(lineno) +
                                ": expected atom count, got '" + line + "'");
            got_count = true;
            break;
        }
        if (!got_count) break;  // clean EOF

        if (!std::getline(in, line))
            throw DataError("xyz parse error at line " + std::to_string(lineno) +
                            ": missing comment line after atom count");
        ++lineno;

        PointCloud cloud;
        cloud.frame_id = frame_id;
        cloud.source_tag = tag;
        cloud.points.reserve(natoms);
        cloud.elements.reserve(natoms);
        for (int i = 0; i < natoms; ++i) {
            if (!std::getline(in, line))
                throw DataError("xyz parse error: frame " + std::to_string(frame_id) +
                                " declares " + std::to_string(natoms) + " atoms but ends after " +
                                std::to_string(i));
            ++lineno;
            std::istringstream atom(line);
            std::string sym, xs, ys, zs;
            if (!(atom >> sym >> xs >> ys >> zs))
                throw DataError("xyz parse error at line " + std::to_string(lineno) +
                                ": expected 'element x y z'");
            double x, y, z;
            if (!parse_double(xs, x) || !parse_double(ys, y) || !parse_double(zs, z))
                throw DataError("xyz parse error at line " + std::to_string(lineno) +
                                ": non-numeric coordinate");
            cloud.points.emplace_back(x, y, z);
            cloud.elements.push_back(sym);
        }
        validate_cloud(cloud);
        traj.frames.push_back(std::move(cloud));
        ++frame_id;
    }
    if (traj.frames.empty())
        throw DataError("xyz input '" + tag + "' contains no frames");
    return traj;
}

TrajectorySet load_xyz(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open xyz file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_xyz(buf.str(), std::filesystem::path(path).stem().string());
}

std::string write_xyz(const TrajectorySet& traj) {
    std::ostringstream out;
    char num[64];
    for (const auto& frame : traj.frames) {
        out << frame.points.size() << "\n";
        out << traj.group_label << " frame " << frame.frame_id << "\n";
        for (std::size_t i = 0; i < frame.points.size(); ++i) {
            const char* sym = frame.elements.empty() ? "X" : frame.elements[i].c_str();
            out << sym;
            for (int c = 0; c < 3; ++c) {
                std::snprintf(num, sizeof(num), " %.17g", frame.points[i][c]);
                out << num;
            }
            out << "\n";
        }
    }
    return out.str();
}

std::vector<TrajectorySet> load_inputs(const std::vector<std::string>& paths) {
    namespace fs = std::filesystem;
    std::vector<TrajectorySet> sets;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> files;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && entry.path().extension() == ".xyz")
                    files.push_back(entry.path().string());
            }
            std::sort(files.begin(), files.end());
            if (files.empty())
                throw DataError("directory contains no .xyz files: " + p);
            for (const auto& f : files) sets.push_back(load_xyz(f));
        } else {
            sets.push_back(load_xyz(p));
        }
    }
    if (sets.empty())
        throw DataError("no inputs given");
    return sets;
}

}  // namespace topsim
