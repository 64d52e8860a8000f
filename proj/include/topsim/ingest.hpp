#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "topsim/errors.hpp"

namespace topsim {

/// Two points closer than this (in Angstrom) are considered duplicates and
/// rejected during validation.
constexpr double kDuplicateTolerance = 1e-9;

/// A single molecular configuration: 3D coordinates in Angstrom plus
/// optional element symbols. Element symbols are carried for provenance only
/// and never enter any distance computation.
struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<std::string> elements;  // same length as points, or empty
    int frame_id = 0;
    std::string source_tag;

    std::size_t size() const { return points.size(); }
};

/// An ordered sequence of frames from one trajectory file.
struct TrajectorySet {
    std::vector<PointCloud> frames;
    std::string group_label;
};

/// Checks the PointCloud invariants: non-empty, finite coordinates, no two
/// points within kDuplicateTolerance. Returns the cloud unchanged on success.
const PointCloud& validate_cloud(const PointCloud& cloud);

/// Parses a multi-frame XYZ file (count line, comment line, `element x y z`
/// rows, frames concatenated). Frames are validated; frame_ids count from 0.
/// The group label and per-frame source_tag are the file stem.
TrajectorySet load_xyz(const std::string& path);

/// Parses XYZ content from a string; `tag` is used for labels.
TrajectorySet parse_xyz(const std::string& content, const std::string& tag);

/// Serializes a TrajectorySet back to XYZ text. Coordinates round-trip
/// exactly (shortest representation that restores the double).
std::string write_xyz(const TrajectorySet& traj);

/// Loads all inputs: each path may be an .xyz file or a directory, in which
/// case every *.xyz inside (sorted lexicographically) yields one set.
std::vector<TrajectorySet> load_inputs(const std::vector<std::string>& paths);

}  // namespace topsim
