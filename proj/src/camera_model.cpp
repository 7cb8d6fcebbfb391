#include "gtslam/camera_model.hpp"

#include "gtslam/errors.hpp"
#include "gtslam/points.hpp"
#include "gtslam/projection.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gtslam {

CameraModel::CameraModel(const Eigen::Matrix3d& intrinsics,
                         const Eigen::Matrix4d& camera_to_robot,
                         int image_width, int image_height)
    : k_(intrinsics), t_rc_(camera_to_robot), width_(image_width), height_(image_height) {
    if (width_ <= 0 || height_ <= 0) {
        throw std::invalid_argument("CameraModel: image dimensions must be positive");
    }
    if (k_(2, 0) != 0.0 || k_(2, 1) != 0.0 || k_(2, 2) != 1.0) {
        throw std::invalid_argument("CameraModel: last row of K must be (0, 0, 1)");
    }
    if (std::abs(k_.determinant()) < 1e-12) {
        throw std::invalid_argument("CameraModel: K is singular");
    }
    k_inv_ = k_.inverse();

    const Eigen::Matrix3d r = t_rc_.topLeftCorner<3, 3>();
    if ((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() > 1e-9 ||
        std::abs(r.determinant() - 1.0) > 1e-9) {
        throw std::invalid_argument("CameraModel: T_RC rotation is not orthonormal");
    }
    if (t_rc_.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
        throw std::invalid_argument("CameraModel: T_RC last row must be (0, 0, 0, 1)");
    }

    // d is the distance along the optical axis from the camera center to the
    // z = 0 ground plane, derived from T_RC rather than user-supplied.
    const Eigen::Vector3d center = t_rc_.topRightCorner<3, 1>();
    const Eigen::Vector3d axis = r.col(2); // optical axis in robot frame
    if (axis.z() >= -1e-12) {
        throw std::invalid_argument("CameraModel: optical axis does not point at the ground");
    }
    d_ = -center.z() / axis.z();
    if (d_ <= 0.0) {
        throw std::invalid_argument("CameraModel: derived ground distance must be positive");
    }

    // The axis point at distance d must land on the ground plane.
    const Eigen::Vector4d axis_point = t_rc_ * Eigen::Vector4d(0, 0, d_, 1);
    if (std::abs(axis_point.z()) > kPlanarityTolerance) {
        throw std::invalid_argument("CameraModel: inconsistent T_RC / ground distance");
    }
}

Eigen::Matrix2Xd CameraModel::footprint_corners() const {
    Eigen::Matrix2Xd corners(2, 4);
    corners << 0.0, width_ - 1.0, width_ - 1.0, 0.0,
               0.0, 0.0, height_ - 1.0, height_ - 1.0;
    const PixelPoints px(corners);
    return project_keypoints(px, *this).m;
}

double CameraModel::footprint_diagonal() const {
    const Eigen::Matrix2Xd c = footprint_corners();
    return (c.col(2) - c.col(0)).norm();
}

namespace {

std::map<std::string, std::vector<double>> parse_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open camera config: " + path);
    }
    std::map<std::string, std::vector<double>> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) {
            continue;
        }
        std::string eq;
        ls >> eq;
        if (eq != "=") {
            throw Error("camera config: expected '=' after key '" + key + "' in " + path);
        }
        std::vector<double> values;
        double v;
        while (ls >> v) {
            values.push_back(v);
        }
        if (values.empty()) {
            throw Error("camera config: no value for key '" + key + "' in " + path);
        }
        kv[key] = values;
    }
    return kv;
}

double scalar(const std::map<std::string, std::vector<double>>& kv, const std::string& key,
              const std::string& path) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw Error("camera config: missing key '" + key + "' in " + path);
    }
    if (it->second.size() != 1) {
        throw Error("camera config: key '" + key + "' must have one value in " + path);
    }
    return it->second[0];
}

} // namespace

CameraModel load_camera_config(const std::string& path) {
    const auto kv = parse_key_values(path);

    Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
    k(0, 0) = scalar(kv, "fx", path);
    k(1, 1) = scalar(kv, "fy", path);
    k(0, 2) = scalar(kv, "cx", path);
    k(1, 2) = scalar(kv, "cy", path);

    const int width = static_cast<int>(scalar(kv, "width", path));
    const int height = static_cast<int>(scalar(kv, "height", path));

    const auto it = kv.find("t_rc");
    if (it == kv.end()) {
        throw Error("camera config: missing key 't_rc' in " + path);
    }
    if (it->second.size() != 16) {
        throw Error("camera config: t_rc must have 16 row-major values in " + path);
    }
    Eigen::Matrix4d t_rc;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            t_rc(r, c) = it->second[static_cast<size_t>(r * 4 + c)];
        }
    }
    return CameraModel(k, t_rc, width, height);
}

void save_camera_config(const CameraModel& cam, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write camera config: " + path);
    }
    char buf[512];
    const Eigen::Matrix3d& k = cam.intrinsics();
    std::snprintf(buf, sizeof(buf),
                  "fx = %.17g\nfy = %.17g\ncx = %.17g\ncy = %.17g\nwidth = %d\nheight = %d\n",
                  k(0, 0), k(1, 1), k(0, 2), k(1, 2), cam.width(), cam.height());
    out << buf << "t_rc =";
    const Eigen::Matrix4d& t = cam.camera_to_robot();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            std::snprintf(buf, sizeof(buf), " %.17g", t(r, c));
            out << buf;
        }
    }
    out << "\n";
    if (!out) {
        throw Error("failed writing camera config: " + path);
    }
}

} // namespace gtslam
