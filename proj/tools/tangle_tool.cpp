// Batch CLI over the tangles library: ingest universes, set separations or
// graph edge lists, run the enumerations and tree constructions, and emit
// canonical JSON / DOT plus a run manifest.

#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "tangles/io.hpp"

using namespace tangles;

namespace {

struct CommonOpts {
  std::string input;
  std::string output;    // JSON result file; stdout when empty
  std::string dot;       // optional DOT file for tree results
  std::string manifest;  // optional run manifest file
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_dot = true) {
  cmd->add_option("--input", opts.input, "input file (universe.v1 / setsep.v1 / edge list)")
      ->required();
  cmd->add_option("--output", opts.output, "write result JSON here (default: stdout)");
  if (with_dot) cmd->add_option("--dot", opts.dot, "write the tree as DOT here");
  cmd->add_option("--manifest", opts.manifest, "write a run manifest here");
}

// Emits the result (and optional DOT), then the manifest recording all
// output digests. Byte-identical reruns follow from canonical JSON.
struct Emitter {
  const CommonOpts& opts;
  RunManifest man;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  explicit Emitter(const CommonOpts& o, const std::vector<std::string>& argv)
      : opts(o) {
    man.command = argv;
    man.input_path = o.input;
    man.input_digest = digest_bytes(read_file(o.input));
    man.config = json{{"caps", caps_to_json(default_caps())}};
  }

  void dot(const STree& t, const Universe& u) {
    if (opts.dot.empty()) return;
    std::string bytes = stree_to_dot(t, u);
    write_file(opts.dot, bytes);
    man.outputs.push_back({opts.dot, digest_bytes(bytes)});
  }

  void finish(const json& result) {
    std::string bytes = canonical_bytes(result);
    if (opts.output.empty()) {
      std::cout << bytes;
      man.outputs.push_back({"stdout", digest_bytes(bytes)});
    } else {
      write_file(opts.output, bytes);
      man.outputs.push_back({opts.output, digest_bytes(bytes)});
    }
    if (!opts.manifest.empty()) {
      man.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      write_file(opts.manifest, canonical_bytes(man.to_json()));
    }
  }
};

json law_report_json(const LawReport& rep) {
  json j;
  j["poset"] = rep.poset_ok;
  j["involution"] = rep.involution_ok;
  j["lattice"] = rep.lattice_ok;
  j["demorgan"] = rep.demorgan_ok;
  if (rep.order_ok) j["order"] = *rep.order_ok;
  if (rep.submodular_ok) j["submodular"] = *rep.submodular_ok;
  if (rep.distributive_ok) j["distributive"] = *rep.distributive_ok;
  j["ok"] = rep.ok();
  if (!rep.detail.empty()) j["detail"] = rep.detail;
  return j;
}

json tot_result_json(const ToTResult& res, const std::vector<Profile>& profiles) {
  json j;
  j["tree"] = stree_to_json(res.tree);
  j["nested"] = nested_to_json(res.nested);
  json profs = json::array();
  for (const auto& p : profiles) profs.push_back(orientation_to_json(p.o));
  j["profiles"] = std::move(profs);
  j["sinks"] = res.sink_of;
  j["degrees"] = res.degree_of;
  j["max_degree"] = res.max_degree;
  if (!res.delta.empty()) j["delta"] = res.delta;
  if (res.iterations) j["iterations"] = res.iterations;
  return j;
}

std::vector<Profile> strongly_robust_profiles(const SepSystem& sys,
                                              const EnumOptions& eo) {
  std::vector<Profile> out;
  for (auto& p : enumerate_profiles(sys, /*regular_only=*/true, eo)) {
    auto c = classify_orientation(p.o);
    if (c.strongly_robust.value_or(false)) out.push_back(std::move(p));
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{
      "tangle_tool: separation universes, profiles, duality and trees of "
      "tangles.\nSize guards default to max_unoriented=64, max_closure=4096, "
      "max_enum_unoriented=26 and can be overridden via TANGLE_CAP_MAX_"
      "UNORIENTED, TANGLE_CAP_MAX_CLOSURE, TANGLE_CAP_MAX_ENUM_UNORIENTED."};
  app.require_subcommand(1);
  std::vector<std::string> argv_copy(argv, argv + argc);

  CommonOpts opts;
  int guard = -1;          // orientation enumeration guard override
  bool all_orients = false;
  std::string family_kind = "fp";
  bool verify = false;
  int k = -1;
  bool degrees = false;
  bool efficient = false;
  std::vector<int> orders;

  auto* c_validate = app.add_subcommand("validate", "parse a file and report the law checks");
  add_common(c_validate, opts, /*with_dot=*/false);

  auto* c_profiles = app.add_subcommand("profiles", "enumerate regular profiles");
  add_common(c_profiles, opts, /*with_dot=*/false);
  c_profiles->add_flag("--all", all_orients, "also list non-profile consistent orientations");
  c_profiles->add_option("--guard", guard, "raise the enumeration guard");
  c_profiles->add_option("--k", k, "restrict to separations of order < k first");

  auto* c_duality = app.add_subcommand("duality", "run the tangle-tree duality solver");
  add_common(c_duality, opts);
  c_duality->add_option("--family", family_kind,
                        "fp (profile-derived, shift-closed) or fd (weak orientations)");
  c_duality->add_flag("--verify", verify, "verify standardness and critical separability");
  c_duality->add_option("--guard", guard, "raise the enumeration guard");

  auto* c_tot = app.add_subcommand("tot", "tree of tangles for regular profiles");
  add_common(c_tot, opts);
  c_tot->add_option("--guard", guard, "raise the enumeration guard");

  auto* c_totdeg = app.add_subcommand("tot-degree", "tree of tangles with minimal sink degrees");
  add_common(c_totdeg, opts);
  c_totdeg->add_option("--guard", guard, "raise the enumeration guard");

  auto* c_toteff = app.add_subcommand("tot-efficient",
                                      "tree of tangles with minimum-order distinguishers");
  add_common(c_toteff, opts);
  c_toteff->add_option("--k", k, "profile order: separations of order < k")->required();
  c_toteff->add_flag("--degrees", degrees, "also pin sink degrees to the minimum");
  c_toteff->add_option("--guard", guard, "raise the enumeration guard");

  auto* c_totmix = app.add_subcommand("tot-mixed", "tree of tangles across profile orders");
  add_common(c_totmix, opts);
  c_totmix->add_option("--orders", orders, "profile orders to collect")->required();
  c_totmix->add_flag("--efficient", efficient, "post-process to minimum-order certificates");
  c_totmix->add_option("--guard", guard, "raise the enumeration guard");

  auto* c_oracle = app.add_subcommand("oracle", "brute-force cross-checks, pass/fail report");
  add_common(c_oracle, opts, /*with_dot=*/false);
  c_oracle->add_option("--k", k, "also cross-check the efficient tree at this order");
  c_oracle->add_option("--guard", guard, "raise the enumeration guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  apply_env_caps();
  EnumOptions eo;
  if (guard > 0) eo.guard_override = guard;

  ParsedInput in = parse_input(opts.input);
  Emitter emit(opts, argv_copy);
  SepSystem sys = in.system();

  if (*c_validate) {
    json j;
    j["format"] = in.format;
    j["universe_size"] = in.u.size();
    j["system_size"] = static_cast<int>(sys.elems.size());
    j["laws"] = law_report_json(in.u.check_laws(/*check_distributive=*/true));
    emit.finish(j);
    return 0;
  }

  if (*c_profiles) {
    if (k > 0) sys = restrict_Sk(in.u, k);
    json j;
    json profs = json::array();
    for (const auto& p : enumerate_profiles(sys, /*regular_only=*/true, eo))
      profs.push_back(orientation_to_json(p.o));
    j["count"] = profs.size();
    j["profiles"] = std::move(profs);
    if (all_orients) {
      json others = json::array();
      for (const auto& o : enumerate_consistent_orientations(sys, eo))
        others.push_back(orientation_to_json(o));
      j["consistent_orientations"] = std::move(others);
    }
    emit.finish(j);
    return 0;
  }

  if (*c_duality) {
    StarFamily fam = [&] {
      if (family_kind == "fp") {
        auto profiles = enumerate_profiles(sys, true, eo);
        std::vector<Star> seed = build_profile_triples(sys).members;
        for (auto& m : build_cosmall_singletons(sys).members) seed.push_back(m);
        for (auto& m : build_max_sets(sys, profiles).members) seed.push_back(m);
        return build_shift_closure(sys, uncross_members(seed, sys));
      }
      if (family_kind == "fd") {
        SepSystem whole = SepSystem::whole(in.u);
        auto profiles = strongly_robust_profiles(sys, eo);
        return build_weakly_oriented(whole, profiles);
      }
      throw ParseError("--family: expected fp or fd");
    }();
    auto res = solve_duality(family_kind == "fd" ? SepSystem::whole(in.u) : sys,
                             fam, verify ? DualityMode::Verify : DualityMode::Assume,
                             eo);
    json j = duality_to_json(res);
    j["family"] = family_to_json(fam);
    if (res.tree) emit.dot(*res.tree, in.u);
    emit.finish(j);
    return 0;
  }

  if (*c_tot || *c_totdeg) {
    ToTResult res = *c_tot ? tot_submodular(sys, eo) : tot_degree(sys, eo);
    auto profiles = enumerate_profiles(sys, true, eo);
    json j = tot_result_json(res, profiles);
    if (*c_totdeg) {
      json census = json::array();
      for (size_t i = 0; i < profiles.size(); ++i)
        census.push_back(json{{"profile", i},
                              {"degree", res.degree_of[i]},
                              {"delta", res.delta[i]}});
      j["degree_census"] = std::move(census);
    }
    emit.dot(res.tree, in.u);
    emit.finish(j);
    return 0;
  }

  if (*c_toteff) {
    ToTResult res = degrees ? tot_efficient_degrees(in.u, k, eo)
                            : tot_efficient(in.u, k, eo);
    auto profiles = enumerate_profiles(restrict_Sk(in.u, k), true, eo);
    json j = tot_result_json(res, profiles);
    emit.dot(res.tree, in.u);
    emit.finish(j);
    return 0;
  }

  if (*c_totmix) {
    auto mp = collect_mixed_profiles(in.u, orders, eo);
    ToTResult res = tot_mixed(in.u, mp.profiles, efficient);
    json j = tot_result_json(res, mp.profiles);
    json ks = json::array();
    for (const auto& p : mp.profiles) ks.push_back(p.k);
    j["profile_orders"] = std::move(ks);
    emit.dot(res.tree, in.u);
    emit.finish(j);
    return 0;
  }

  if (*c_oracle) {
    json checks = json::array();
    bool all_ok = true;
    auto record = [&](const std::string& name, bool ok, const std::string& note = "") {
      json c{{"check", name}, {"ok", ok}};
      if (!note.empty()) c["note"] = note;
      checks.push_back(std::move(c));
      all_ok &= ok;
    };

    auto verify_nested = [&](const ToTResult& res, const std::vector<Profile>& ps,
                             bool need_eff, const std::string& tag) {
      bool nested_ok = pairwise_nested(res.nested.labels, in.u);
      record(tag + ": labels pairwise nested", nested_ok);
      bool cert_ok = true, eff_ok_all = true;
      for (const auto& c : res.nested.certs) {
        bool fwd = ps[c.p].o.contains(c.sep) && ps[c.q].o.contains(in.u.inv(c.sep));
        cert_ok &= fwd && in.u.order(c.sep) == c.order;
        int mo = min_distinguisher_order(ps[c.p].o, ps[c.q].o, in.u);
        cert_ok &= mo == c.min_order;
        if (need_eff) eff_ok_all &= c.efficient && c.order == mo;
      }
      record(tag + ": certificates re-derive", cert_ok);
      if (need_eff) record(tag + ": certificate orders are minimal", eff_ok_all);
    };

    if (is_structurally_submodular(sys)) {
      auto res = tot_submodular(sys, eo);
      auto profiles = enumerate_profiles(sys, true, eo);
      verify_nested(res, profiles, false, "tot");
    } else {
      record("tot", true, "skipped: system is not structurally submodular");
    }
    if (in.u.has_order() && k > 0) {
      auto res = tot_efficient(in.u, k, eo);
      auto profiles = enumerate_profiles(restrict_Sk(in.u, k), true, eo);
      verify_nested(res, profiles, true, "tot-efficient");
    }

    json j;
    j["checks"] = std::move(checks);
    j["ok"] = all_ok;
    emit.finish(j);
    for (const auto& c : j["checks"])
      std::cerr << (c["ok"].get<bool>() ? "PASS " : "FAIL ")
                << c["check"].get<std::string>() << "\n";
    if (!all_ok) throw InternalError("oracle cross-check failed");
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return 2;
  } catch (const EnumGuardError& e) {
    std::cerr << "size guard: " << e.what() << "\n";
    return 2;
  } catch (const UniverseError& e) {
    std::cerr << "invalid universe: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal invariant breach: " << e.what() << "\n";
    return 3;
  }
}
