#include <CLI11.hpp>
#include <Eigen/SVD>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ncx/calculus.hpp"
#include "ncx/convexity.hpp"
#include "ncx/middlematrix.hpp"
#include "ncx/numeval.hpp"
#include "ncx/textio.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;      // counterexample / NotConvex / violated hypothesis
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct Common {
  std::string poly;
  int ga = -1;
  int gx = -1;
  std::string format = "json";
  double tol = ncx::kPsdTol;
  std::uint64_t seed = 20100507;
};

void addCommon(CLI::App* sub, Common& c, bool takesPoly = true) {
  if (takesPoly)
    sub->add_option("poly", c.poly, "polynomial in the text grammar ('-' reads stdin)")
        ->required();
  sub->add_option("--ga", c.ga, "number of a variables (default: inferred)");
  sub->add_option("--gx", c.gx, "number of x variables (default: inferred)");
  sub->add_option("--format", c.format, "output format: json|pretty")
      ->check(CLI::IsMember({"json", "pretty"}));
  sub->add_option("--tol", c.tol, "PSD / certificate tolerance");
  sub->add_option("--seed", c.seed, "RNG seed");
}

std::string readPolyText(const std::string& arg) {
  if (arg != "-") return arg;
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

ncx::NCPolynomial loadPoly(const Common& c, bool allowH = false) {
  std::string text = readPolyText(c.poly);
  ncx::VarCounts counts = ncx::inferCounts(text);
  if (c.ga >= 0) counts.a = static_cast<std::uint32_t>(c.ga);
  if (c.gx >= 0) counts.x = static_cast<std::uint32_t>(c.gx);
  ncx::NCPolynomial p = ncx::parsePolynomial(text, counts);
  if (!allowH && p.containsClass(ncx::VarClass::H))
    throw std::invalid_argument("this command does not accept direction letters (h)");
  return p;
}

ncx::DomainSpec parseDomain(const std::string& text) {
  if (text == "all") return ncx::DomainSpec::all();
  if (text.rfind("ball:", 0) == 0) {
    double r = std::stod(text.substr(5));
    // constrain both variable blocks to the ball of radius r
    return ncx::DomainSpec::product({ncx::DomainSpec::normBall(r, ncx::VarClass::A),
                                     ncx::DomainSpec::normBall(r, ncx::VarClass::X)});
  }
  if (text.rfind("eps:", 0) == 0) {
    double e = std::stod(text.substr(4));
    return ncx::DomainSpec::product(
        {ncx::DomainSpec::epsilonNeighborhood(e, ncx::VarClass::A),
         ncx::DomainSpec::epsilonNeighborhood(e, ncx::VarClass::X)});
  }
  throw std::invalid_argument("unknown domain '" + text + "' (use all | ball:R | eps:E)");
}

json tupleToJson(const ncx::MatrixTuple& t) {
  json mats = json::array();
  for (const auto& m : t.mats) {
    std::vector<double> flat;
    for (int r = 0; r < t.n; ++r)
      for (int cc = 0; cc < t.n; ++cc) flat.push_back(m(r, cc));
    mats.push_back(flat);
  }
  return json{{"n", t.n}, {"mats", mats}};
}

json matrixPolyToJson(const ncx::MatrixPoly& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(ncx::printPolynomial(m.at(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json doubleMatrixToJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void printMatrixPretty(std::ostream& os, const ncx::MatrixPoly& m) {
  std::vector<std::size_t> width(m.cols(), 0);
  std::vector<std::vector<std::string>> cells(m.rows(), std::vector<std::string>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      cells[i][j] = ncx::printPolynomial(m.at(i, j));
      width[j] = std::max(width[j], cells[i][j].size());
    }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << "[ ";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      os << cells[i][j] << std::string(width[j] - cells[i][j].size(), ' ');
      os << (j + 1 < m.cols() ? ", " : " ");
    }
    os << "]\n";
  }
}

std::vector<std::string> borderLabels(const ncx::BorderVector& b) {
  std::vector<std::string> out;
  for (const auto& w : b.entries()) out.push_back(ncx::printWord(w));
  return out;
}

std::string formName(ncx::Decomposition::Form f) {
  switch (f) {
    case ncx::Decomposition::Form::VzvL: return "VZV_L";
    case ncx::Decomposition::Form::SosL: return "SOS_L";
    case ncx::Decomposition::Form::ConvexConcave: return "ConvexConcave";
    case ncx::Decomposition::Form::SeparateConvex: return "SeparateConvex";
    case ncx::Decomposition::Form::LocalRq: return "LocalRQ";
  }
  return "?";
}

std::string statusName(ncx::ConvexityVerdict::Status s) {
  using S = ncx::ConvexityVerdict::Status;
  switch (s) {
    case S::ConvexCertified: return "ConvexCertified";
    case S::NotConvex: return "NotConvex";
    case S::DegreeObstruction: return "DegreeObstruction";
    case S::PositivitySampled: return "PositivitySampled";
    case S::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string printNumericPoly(const ncx::NumericPoly& p) {
  if (p.terms.empty()) return "0";
  std::ostringstream out;
  out.precision(12);
  bool first = true;
  for (const auto& [w, c] : p.terms) {
    if (!first) out << (c < 0 ? " - " : " + ");
    else if (c < 0) out << "-";
    first = false;
    double mag = std::abs(c);
    if (w.empty())
      out << mag;
    else if (std::abs(mag - 1.0) < 1e-12)
      out << ncx::printWord(w);
    else
      out << mag << "*" << ncx::printWord(w);
  }
  return out.str();
}

json decompositionToJson(const ncx::Decomposition& d) {
  json j;
  j["form"] = formName(d.form);
  j["method"] = d.method;
  j["L"] = ncx::printPolynomial(d.L);
  j["residual_zero"] = d.residual.isZero();
  j["numeric_residual"] = d.numericResidual;
  if (d.middle) {
    j["border"] = borderLabels(d.middle->border);
    j["Z"] = matrixPolyToJson(d.middle->Z);
  }
  json factors = json::object();
  if (d.sosFactor) factors["R"] = doubleMatrixToJson(*d.sosFactor);
  if (d.qBlockFactor) factors["S"] = doubleMatrixToJson(*d.qBlockFactor);
  for (const auto& [name, gram] : d.grams) {
    json g;
    std::vector<std::string> basis;
    for (const auto& w : gram.basis) basis.push_back(ncx::printWord(w));
    g["basis"] = basis;
    g["matrix"] = matrixPolyToJson(gram.gram);
    g["min_eig"] = gram.minEig;
    g["factor"] = doubleMatrixToJson(gram.factor);
    j["grams"][name] = g;
  }
  if (!d.lambdaPos.empty()) {
    json lam = json::array();
    for (const auto& row : d.lambdaPos) lam.push_back(printNumericPoly(row));
    j["lambda"] = lam;
  }
  if (!d.lambdaNeg.empty()) {
    json lam = json::array();
    for (const auto& row : d.lambdaNeg) lam.push_back(printNumericPoly(row));
    j["lambda_negative"] = lam;
  }
  if (d.Rmat) j["R"] = matrixPolyToJson(*d.Rmat);
  if (d.Qmat) j["Q"] = matrixPolyToJson(*d.Qmat);
  j["factors"] = factors;
  if (d.certificate.checked) {
    j["certificate"] = json{{"holds", d.certificate.holds},
                            {"certified", d.certificate.certified},
                            {"samples", d.certificate.samples},
                            {"min_eig", d.certificate.minEig},
                            {"seed", d.certificate.seed}};
  }
  return j;
}

void emit(const Common& c, const json& j, const std::string& pretty) {
  if (c.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << pretty;
}

ncx::EvalPoint loadEvalPoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open point file: " + path);
  json j = json::parse(in);
  ncx::EvalPoint pt;
  if (j.contains("A")) pt.A = ncx::matrixTupleFromJson(j["A"].dump());
  if (j.contains("X")) pt.X = ncx::matrixTupleFromJson(j["X"].dump());
  if (j.contains("H")) pt.H = ncx::matrixTupleFromJson(j["H"].dump());
  if (j.contains("K")) pt.K = ncx::matrixTupleFromJson(j["K"].dump());
  pt.validate();
  return pt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ncx: non-commutative partial convexity toolkit"};
  app.require_subcommand(1);

  Common c;
  std::function<int()> action;

  // hessian ------------------------------------------------------------
  auto* hessianCmd = app.add_subcommand("hessian", "partial Hessian of a polynomial");
  std::string hessVar = "x";
  addCommon(hessianCmd, c);
  hessianCmd->add_option("--var", hessVar, "differentiate in x or a")
      ->check(CLI::IsMember({"x", "a"}));
  hessianCmd->callback([&] {
    action = [&]() -> int {
      ncx::NCPolynomial p = loadPoly(c);
      ncx::HessianPoly h =
          hessVar == "x" ? ncx::partialHessianX(p) : ncx::partialHessianA(p);
      std::string s = ncx::printPolynomial(h.q);
      emit(c, json{{"hessian", s}, {"direction", hessVar}}, s + "\n");
      return kExitOk;
    };
  });

  // middlematrix ---------------------------------------------------------
  auto* mmCmd = app.add_subcommand("middlematrix", "border vector and middle matrix");
  bool mmFull = false, mmDerived = false;
  addCommon(mmCmd, c);
  mmCmd->add_flag("--full", mmFull, "full border (paper heights) instead of reduced");
  mmCmd->add_flag("--derived", mmDerived, "derived matrix Z(a,0)");
  mmCmd->callback([&] {
    action = [&]() -> int {
      ncx::NCPolynomial p = loadPoly(c);
      ncx::HessianPoly h = ncx::partialHessianX(p);
      if (h.q.isZero()) {
        emit(c, json{{"border", json::array()}, {"note", "hessian is zero"}},
             "hessian is zero\n");
        return kExitOk;
      }
      ncx::MiddleMatrix m = ncx::middleMatrix(
          h, mmFull ? ncx::BorderMode::Full : ncx::BorderMode::Reduced);
      if (mmDerived) m = ncx::derivedMatrix(m);
      json j;
      j["border"] = borderLabels(m.border);
      json blocks = json::array();
      for (std::size_t k = 0; k < m.border.blockCount(); ++k)
        blocks.push_back(m.border.blockSize(k));
      j["block_sizes"] = blocks;
      j["Z"] = matrixPolyToJson(m.Z);
      std::ostringstream pretty;
      pretty << "border:";
      for (const auto& l : borderLabels(m.border)) pretty << " " << l;
      pretty << "\n" << (mmDerived ? "Z(a,0):" : "Z(a,x):") << "\n";
      printMatrixPretty(pretty, m.Z);
      emit(c, j, pretty.str());
      return kExitOk;
    };
  });

  // congruence -----------------------------------------------------------
  auto* congCmd = app.add_subcommand("congruence", "K matrices and B^T Z B = Z(a,0)");
  bool congNumeric = false;
  int congSamples = 5;
  addCommon(congCmd, c);
  congCmd->add_flag("--verify-numeric", congNumeric, "also check at random points");
  congCmd->add_option("--samples", congSamples, "number of numeric check points");
  congCmd->callback([&] {
    action = [&]() -> int {
      ncx::NCPolynomial p = loadPoly(c);
      ncx::HessianPoly h = ncx::partialHessianX(p);
      if (h.q.isZero()) {
        emit(c, json{{"note", "hessian is zero"}}, "hessian is zero\n");
        return kExitOk;
      }
      ncx::MiddleMatrix m = ncx::middleMatrix(h, ncx::BorderMode::Reduced);
      ncx::CongruenceData cd = ncx::congruence(m);
      ncx::MiddleMatrix der = ncx::derivedMatrix(m);
      bool za = (m.Z * cd.A) == der.Z;
      bool b2 = (cd.B * cd.B) == cd.A;
      bool bi = (cd.B * cd.Binv) ==
                ncx::MatrixPoly::identity(m.size(), m.Z.counts());
      bool btzb = (cd.B.transposed() * m.Z * cd.B) == der.Z;
      json j;
      j["border"] = borderLabels(m.border);
      j["identities"] = json{{"ZA_eq_derived", za},
                             {"B2_eq_A", b2},
                             {"BBinv_eq_I", bi},
                             {"BtZB_eq_derived", btzb}};
      json ks = json::array();
      for (const auto& K : cd.Ks) ks.push_back(matrixPolyToJson(K));
      j["K"] = ks;
      std::ostringstream pretty;
      pretty << "exact identities: Z*A=Z(a,0) " << (za ? "ok" : "FAIL") << ", B^2=A "
             << (b2 ? "ok" : "FAIL") << ", B*Binv=I " << (bi ? "ok" : "FAIL")
             << ", B^T*Z*B=Z(a,0) " << (btzb ? "ok" : "FAIL") << "\n";
      for (std::size_t i = 0; i < cd.Ks.size(); ++i) {
        pretty << "K_" << i << ":\n";
        printMatrixPretty(pretty, cd.Ks[i]);
      }
      if (congNumeric) {
        const ncx::VarCounts& counts = h.q.counts();
        double worst = 0.0;
        bool invertible = true;
        for (int s = 0; s < congSamples; ++s) {
          int n = s % 3 + 1;
          ncx::EvalPoint pt;
          pt.A = ncx::sampleTuple(ncx::DomainSpec::all(), counts.a, n,
                                  ncx::mixSeed(c.seed, 2 * s));
          pt.X = ncx::sampleTuple(ncx::DomainSpec::all(), counts.x, n,
                                  ncx::mixSeed(c.seed, 2 * s + 1));
          Eigen::MatrixXd bz = ncx::evalMatrixPoly(cd.B, pt);
          Eigen::MatrixXd zz = ncx::evalMatrixPoly(m.Z, pt);
          Eigen::MatrixXd dz = ncx::evalMatrixPoly(der.Z, pt);
          double scale = std::max(1.0, ncx::maxAbs(zz));
          worst = std::max(worst, ncx::maxAbs(bz.transpose() * zz * bz - dz) / scale);
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(bz);
          if (svd.singularValues()(svd.singularValues().size() - 1) <=
              1e-10 * svd.singularValues()(0))
            invertible = false;
        }
        j["numeric"] = json{{"samples", congSamples},
                            {"max_relative_defect", worst},
                            {"B_invertible", invertible}};
        pretty << "numeric check over " << congSamples
               << " points: max relative defect " << worst << ", B invertible "
               << (invertible ? "yes" : "NO") << "\n";
      }
      emit(c, j, pretty.str());
      return (za && b2 && bi && btzb) ? kExitOk : kExitInconclusive;
    };
  });

  // convexity -----------------------------------------------------------
  auto* convCmd = app.add_subcommand("convexity", "randomized convexity test");
  std::string convMode = "midpoint", convDomain = "all";
  int convTrials = 200, convNmax = 0;
  addCommon(convCmd, c);
  convCmd->add_option("--mode", convMode, "midpoint|hessian")
      ->check(CLI::IsMember({"midpoint", "hessian"}));
  convCmd->add_option("--domain", convDomain, "all | ball:R | eps:E");
  convCmd->add_option("--trials", convTrials, "number of sampled trials");
  convCmd->add_option("--nmax", convNmax, "max matrix dimension (default N(g,d) capped)");
  convCmd->callback([&] {
    action = [&]() -> int {
      ncx::NCPolynomial p = loadPoly(c);
      ncx::DomainSpec domain = parseDomain(convDomain);
      int nmax = convNmax > 0 ? convNmax : ncx::defaultNmax(p);
      ncx::ConvexityVerdict v =
          convMode == "midpoint"
              ? ncx::midpointConvexityTest(p, domain, convTrials, nmax, c.seed)
              : ncx::hessianPositivityTest(p, domain, convTrials, nmax, c.seed);
      json j;
      j["status"] = statusName(v.status);
      j["min_eig"] = v.minEig;
      j["samples"] = v.samples;
      if (v.status == ncx::ConvexityVerdict::Status::DegreeObstruction)
        j["obstruction_degree"] = v.obstructionDegree;
      if (v.witness) {
        ncx::WitnessSample ws = ncx::reproduceWitnessSample(p, domain, *v.witness);
        json w;
        w["seed"] = v.witness->seed;
        w["trial"] = v.witness->trial;
        w["n"] = v.witness->n;
        w["kind"] = v.witness->kind;
        if (v.witness->kind == "midpoint") w["t"] = v.witness->t;
        w["violation"] = v.witness->violation;
        w["point"] = json{{"A", tupleToJson(ws.A)},
                          {"X", tupleToJson(ws.X)},
                          {v.witness->kind == "midpoint" ? "Y" : "H", tupleToJson(ws.Y)}};
        j["witness"] = w;
      }
      if (!v.notes.empty()) j["notes"] = v.notes;
      std::ostringstream pretty;
      pretty << statusName(v.status);
      if (v.status == ncx::ConvexityVerdict::Status::DegreeObstruction)
        pretty << " (degree " << v.obstructionDegree << " in x)";
      if (v.witness)
        pretty << ": violation " << v.witness->violation << " at n=" << v.witness->n
               << " (trial " << v.witness->trial << ")";
      else
        pretty << ": min eigenvalue " << v.minEig << " over " << v.samples << " samples";
      pretty << "\n";
      emit(c, j, pretty.str());
      switch (v.status) {
        case ncx::ConvexityVerdict::Status::NotConvex:
        case ncx::ConvexityVerdict::Status::DegreeObstruction: return kExitNegative;
        case ncx::ConvexityVerdict::Status::Inconclusive: return kExitInconclusive;
        default: return kExitOk;
      }
    };
  });

  // decompose -----------------------------------------------------------
  auto* decCmd = app.add_subcommand("decompose", "structure decompositions");
  std::string decForm = "x-convex", decDomain = "all";
  int decSamples = 100;
  addCommon(decCmd, c);
  decCmd->add_option("--form", decForm, "x-convex|separate|convex-concave|local-rq")
      ->check(CLI::IsMember({"x-convex", "separate", "convex-concave", "local-rq"}));
  decCmd->add_option("--domain", decDomain, "all | ball:R | eps:E (x-convex certificate)");
  decCmd->add_option("--samples", decSamples, "certificate sample count");
  decCmd->callback([&] {
    action = [&]() -> int {
      ncx::NCPolynomial p = loadPoly(c);
      ncx::Decomposition d;
      if (decForm == "x-convex")
        d = ncx::decomposeConvexInX(p, parseDomain(decDomain), decSamples, c.seed, c.tol);
      else if (decForm == "separate")
        d = ncx::decomposeSeparatelyConvex(p, c.tol);
      else if (decForm == "convex-concave")
        d = ncx::decomposeConvexConcave(p, c.tol);
      else
        d = ncx::localRqForm(p, decSamples, c.seed, c.tol);
      json j = decompositionToJson(d);
      std::ostringstream pretty;
      pretty << "form: " << formName(d.form) << " (" << d.method << ")\n";
      pretty << "L = " << ncx::printPolynomial(d.L) << "\n";
      pretty << "residual zero: " << (d.residual.isZero() ? "yes" : "NO") << "\n";
      if (d.middle) {
        pretty << "border:";
        for (const auto& l : borderLabels(d.middle->border)) pretty << " " << l;
        pretty << "\nZ(a):\n";
        printMatrixPretty(pretty, d.middle->Z);
      }
      for (const auto& row : d.lambdaPos) pretty << "lambda: " << printNumericPoly(row) << "\n";
      for (const auto& row : d.lambdaNeg)
        pretty << "lambda (negative square): " << printNumericPoly(row) << "\n";
      if (d.Rmat) {
        pretty << "R(a):\n";
        printMatrixPretty(pretty, *d.Rmat);
        pretty << "Q(a):\n";
        printMatrixPretty(pretty, *d.Qmat);
      }
      if (d.certificate.checked)
        pretty << "certificate: " << (d.certificate.holds ? "holds" : "FAILS")
               << " (min eig " << d.certificate.minEig << " over " << d.certificate.samples
               << " samples)" << (d.certificate.certified ? " [certified]" : "") << "\n";
      emit(c, j, pretty.str());
      return d.residual.isZero() ? kExitOk : kExitInconclusive;
    };
  });

  // signature -----------------------------------------------------------
  auto* sigCmd = app.add_subcommand("signature", "middle-matrix eigenvalue signature bounds");
  bool sigXZero = false;
  int sigTrials = 50, sigNmax = 0;
  std::string sigPoint;
  addCommon(sigCmd, c);
  sigCmd->add_flag("--x-zero", sigXZero, "sample with X = 0 (derived matrix)");
  sigCmd->add_option("--trials", sigTrials, "trials per dimension");
  sigCmd->add_option("--nmax", sigNmax, "max dimension (default N(g,d) capped)");
  sigCmd->add_option("--point", sigPoint, "JSON file with tuples A, X: also count there");
  sigCmd->callback([&] {
    action = [&]() -> int {
      ncx::NCPolynomial p = loadPoly(c);
      int nmax = sigNmax > 0 ? sigNmax : std::min(ncx::defaultNmax(p), 8);
      ncx::SignatureEstimate est =
          ncx::signatureEstimate(p, sigXZero, nmax, sigTrials, c.seed);
      json j;
      if (!sigPoint.empty()) {
        ncx::EvalPoint pt = loadEvalPoint(sigPoint);
        auto counts = ncx::middleMatrixEigencounts(p, pt);
        j["point_counts"] = json{{"n", pt.n()},
                                 {"mu_plus", counts.first},
                                 {"mu_minus", counts.second}};
        est.muPlusSup = std::max(est.muPlusSup, ncx::Rational(counts.first, pt.n()));
        est.muMinusSup = std::max(est.muMinusSup, ncx::Rational(counts.second, pt.n()));
      }
      j["mu_plus_sup"] = ncx::toString(est.muPlusSup);
      j["mu_minus_sup"] = ncx::toString(est.muMinusSup);
      j["at_x_zero"] = est.atXZero;
      j["positive_count_reached_n"] = est.positiveCountReachedN;
      json ws = json::array();
      for (const auto& w : est.witnesses)
        ws.push_back(json{{"seed", w.seed},
                          {"n", w.n},
                          {"zero_point", w.zeroPoint},
                          {"mu_plus", w.muPlus},
                          {"mu_minus", w.muMinus}});
      j["witnesses"] = ws;
      std::ostringstream pretty;
      pretty << "sigma+ >= " << ncx::toString(est.muPlusSup) << ", sigma- >= "
             << ncx::toString(est.muMinusSup) << " (sup of mu/n over samples"
             << (est.atXZero ? ", X = 0" : "") << ")\n";
      emit(c, j, pretty.str());
      return kExitOk;
    };
  });

  // chsy ----------------------------------------------------------------
  auto* chsyCmd = app.add_subcommand("chsy", "codimension of {V[H]v} at a sampled point");
  int chsyD = 2, chsyN = 0;
  std::string chsyPoint, chsyMonomials;
  addCommon(chsyCmd, c, /*takesPoly=*/false);
  chsyCmd->add_option("--d", chsyD, "number of monomials (default 2)");
  chsyCmd->add_option("--n", chsyN, "matrix dimension (default d+2)");
  chsyCmd->add_option("--point", chsyPoint, "JSON file with tuples A, X");
  chsyCmd->add_option("--monomials", chsyMonomials,
                      "comma-separated monomials (default: first d words in x)");
  chsyCmd->callback([&] {
    action = [&]() -> int {
      std::uint32_t ga = c.ga > 0 ? static_cast<std::uint32_t>(c.ga) : 0;
      std::uint32_t gx = c.gx > 0 ? static_cast<std::uint32_t>(c.gx) : 1;
      int n = chsyN > 0 ? chsyN : chsyD + 2;
      ncx::EvalPoint pt;
      if (!chsyPoint.empty()) {
        pt = loadEvalPoint(chsyPoint);
        ga = pt.A.g();
        gx = pt.X.g();
        n = pt.n();
      } else {
        pt.A = ncx::sampleTuple(ncx::DomainSpec::all(), ga, n, ncx::mixSeed(c.seed, 1));
        pt.X = ncx::sampleTuple(ncx::DomainSpec::all(), gx, n, ncx::mixSeed(c.seed, 2));
      }
      ncx::VarCounts counts{ga, gx, 0};
      std::vector<ncx::Word> monomials;
      if (!chsyMonomials.empty()) {
        std::stringstream ss(chsyMonomials);
        std::string item;
        while (std::getline(ss, item, ',')) {
          ncx::NCPolynomial m = ncx::parsePolynomial(item, counts);
          if (m.termCount() != 1)
            throw std::invalid_argument("monomial list entries must be single words");
          monomials.push_back(m.terms().begin()->first);
        }
      } else {
        // first d words over the x letters in canonical order
        std::vector<ncx::Word> frontier{ncx::Word::identity()};
        while (static_cast<int>(monomials.size()) < chsyD && !frontier.empty()) {
          std::vector<ncx::Word> next;
          for (const auto& w : frontier) {
            if (static_cast<int>(monomials.size()) >= chsyD) break;
            monomials.push_back(w);
            for (std::uint32_t k = 1; k <= gx; ++k)
              next.push_back(w.concat(ncx::Word::single(ncx::VarClass::X, k)));
          }
          frontier = std::move(next);
        }
      }
      std::mt19937_64 rng(ncx::mixSeed(c.seed, 3));
      std::normal_distribution<double> gauss;
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = gauss(rng);
      v.normalize();
      ncx::ChsyReport rep = ncx::chsyCodimension(pt, v, monomials);
      json j;
      j["independent_count"] = rep.independentCount;
      j["codimension"] = rep.codimension;
      j["bound"] = rep.bound;
      j["target_dim"] = rep.targetDim;
      j["rank"] = rep.rank;
      std::ostringstream pretty;
      pretty << "d = " << rep.independentCount << ", codimension = " << rep.codimension
             << ", bound g*d(d-1)/2 = " << rep.bound << "\n";
      emit(c, j, pretty.str());
      return kExitOk;
    };
  });

  // ngd -------------------------------------------------------------------
  auto* ngdCmd = app.add_subcommand("ngd", "faithfulness dimension N(g,d)");
  std::uint32_t ngdG = 0, ngdD = 0;
  std::string ngdFormat = "pretty";
  ngdCmd->add_option("g", ngdG, "number of variables")->required();
  ngdCmd->add_option("d", ngdD, "degree")->required();
  ngdCmd->add_option("--format", ngdFormat, "json|pretty");
  ngdCmd->callback([&] {
    action = [&]() -> int {
      unsigned long long v = ncx::ngd(ngdG, ngdD);
      if (ngdFormat == "json")
        std::cout << json{{"g", ngdG}, {"d", ngdD}, {"ngd", v}}.dump() << "\n";
      else
        std::cout << v << "\n";
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const ncx::HypothesisViolation& e) {
    std::cerr << "negative finding: " << e.what() << "\n";
    return kExitNegative;
  } catch (const ncx::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInconclusive;
  }
}
