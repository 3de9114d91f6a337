#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bykov/cli/config.hpp"

namespace bykov::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct CommandContext {
  RunConfig config;
  std::string out_dir;  // empty: "bykov-<command>"
  bool force = false;
};

const std::vector<std::string>& command_names();

// Runs one subcommand and maps failures to exit codes; messages go to err.
int run_command(const std::string& name, const CommandContext& ctx, std::ostream& out,
                std::ostream& err);

// CSV headers, pinned by tests.
namespace headers {
inline constexpr const char* kConstants = "delta1,delta2,delta,K,K_omega,a,g,f";
inline constexpr const char* kClassify =
    "A,lambda,a,K_omega,torus_threshold,chaos_threshold,classification";
inline constexpr const char* kCheckers = "checker,condition,holds,margin";
inline constexpr const char* kSweep =
    "row,col,axis,axis_value,a,regime,class,lambda_max,lambda_sum,escape_fraction";
inline constexpr const char* kCircle = "i,x,h,residual";
inline constexpr const char* kCircleSummary =
    "N,iterations,last_change,residual,rho,rho_half,rho_converged";
inline constexpr const char* kLyapunov =
    "x0,y0,n,transient,lambda_max,lambda_sum,log_det_average,escaped,escape_index";
inline constexpr const char* kTongue = "A,present,a_birth,curve";
inline constexpr const char* kOrbits =
    "index,period,winding,stability,x,y,mu1_re,mu1_im,mu2_re,mu2_im";
inline constexpr const char* kManifoldPoints = "side,branch,index,x,y";
inline constexpr const char* kHomoclinic = "min_distance,crossings,tangency";
inline constexpr const char* kCrossings = "x,y,orientation";
inline constexpr const char* kEquilibria = "r,z,radial_eig,axial_eig";
inline constexpr const char* kTrajectory = "t,r,z,G";
inline constexpr const char* kSection = "k,t,theta,r";
}  // namespace headers

// Gray level of a sweep cell.
int sweep_gray(const char* regime, bool strange);

}  // namespace bykov::cli
