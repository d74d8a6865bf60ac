// Command-line front-end: convergence studies, reproduction degrees,
// characteristic rings, summary tables and mesh dumps.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <selfsim/approx.hpp>
#include <selfsim/errors.hpp>
#include <selfsim/geometry.hpp>
#include <selfsim/rates.hpp>
#include <selfsim/reproduction.hpp>
#include <selfsim/subdivision.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace selfsim;
using nlohmann::json;

namespace
{
	/// One experiment; JSON keys match the member names.
	struct ExperimentConfig
	{
		std::string domain = "sb1";
		std::vector<int> p{2};
		int levels = 3;
		std::string target = "x^2";
		std::string norm = "l2";
		std::string cap = "auto";
		bool sector_only = false;
		int quad_order = 0;
		bool tensor_grid = false;
		int threads = 0;
		int linf_grid = 33;
		double tol = default_reproduction_tol;
		bool exact = false;
		std::string output;
	};

	template <typename T>
	T get_field(const json &j, const std::string &key)
	{
		try
		{
			return j.at(key).get<T>();
		}
		catch (const json::exception &)
		{
			throw ConfigError(key, "has the wrong type");
		}
	}

	ExperimentConfig load_config(const std::string &path)
	{
		std::ifstream in(path);
		if (!in)
			throw ConfigError("config", "cannot open '" + path + "'");
		json j;
		try
		{
			j = json::parse(in);
		}
		catch (const json::parse_error &e)
		{
			throw ConfigError("config", std::string("invalid JSON: ") + e.what());
		}
		if (!j.is_object())
			throw ConfigError("config", "expected a JSON object");

		ExperimentConfig c;
		for (const auto &[key, value] : j.items())
		{
			if (key == "domain")
				c.domain = get_field<std::string>(j, key);
			else if (key == "p")
				c.p = value.is_array() ? get_field<std::vector<int>>(j, key) : std::vector<int>{get_field<int>(j, key)};
			else if (key == "levels")
				c.levels = get_field<int>(j, key);
			else if (key == "target")
				c.target = get_field<std::string>(j, key);
			else if (key == "norm")
				c.norm = get_field<std::string>(j, key);
			else if (key == "cap")
				c.cap = get_field<std::string>(j, key);
			else if (key == "sector_only")
				c.sector_only = get_field<bool>(j, key);
			else if (key == "quad_order")
				c.quad_order = get_field<int>(j, key);
			else if (key == "tensor_grid")
				c.tensor_grid = get_field<bool>(j, key);
			else if (key == "threads")
				c.threads = get_field<int>(j, key);
			else if (key == "linf_grid")
				c.linf_grid = get_field<int>(j, key);
			else if (key == "tol")
				c.tol = get_field<double>(j, key);
			else if (key == "exact")
				c.exact = get_field<bool>(j, key);
			else if (key == "output")
				c.output = get_field<std::string>(j, key);
			else if (key != "$schema")
				throw ConfigError(key, "unknown configuration field");
		}
		return c;
	}

	/// Flags given on the command line, applied on top of the config file.
	struct Overrides
	{
		std::string config;
		ExperimentConfig flags;
		CLI::App *app = nullptr;

		ExperimentConfig resolve() const
		{
			ExperimentConfig c = config.empty() ? ExperimentConfig{} : load_config(config);
			auto given = [&](const char *name) {
				const CLI::Option *opt = app->get_option_no_throw(name);
				return opt != nullptr && opt->count() > 0;
			};
			if (given("--domain"))
				c.domain = flags.domain;
			if (given("--p"))
				c.p = flags.p;
			if (given("--levels"))
				c.levels = flags.levels;
			if (given("--target"))
				c.target = flags.target;
			if (given("--norm"))
				c.norm = flags.norm;
			if (given("--cap"))
				c.cap = flags.cap;
			if (given("--sector-only"))
				c.sector_only = flags.sector_only;
			if (given("--quad-order"))
				c.quad_order = flags.quad_order;
			if (given("--tensor-grid"))
				c.tensor_grid = flags.tensor_grid;
			if (given("--threads"))
				c.threads = flags.threads;
			if (given("--linf-grid"))
				c.linf_grid = flags.linf_grid;
			if (given("--tol"))
				c.tol = flags.tol;
			if (given("--exact"))
				c.exact = flags.exact;
			if (given("--output"))
				c.output = flags.output;
			return c;
		}
	};

	struct Domain
	{
		RingSpec ring;
		std::optional<ElementMap> global;
	};

	Domain resolve_domain(const std::string &text)
	{
		Domain d;
		if (text == "sb1" || text == "sb2")
		{
			const auto sb = text == "sb1" ? make_sb1() : make_sb2();
			d.ring = sb.ring;
			d.global = sb.global;
		}
		else if (text.rfind("custom:", 0) == 0)
		{
			const std::string path = text.substr(7);
			std::ifstream in(path);
			if (!in)
				throw ConfigError("domain", "cannot open custom domain file '" + path + "'");
			json j;
			try
			{
				j = json::parse(in);
			}
			catch (const json::parse_error &e)
			{
				throw ConfigError("domain", std::string("invalid JSON in '") + path + "': " + e.what());
			}
			d.ring = ring_spec_from_json(j);
			d.global = d.ring.global_map;
		}
		else if (text.rfind("ds:", 0) == 0 || text.rfind("cc:", 0) == 0)
			d.ring = characteristic_ring(parse_scheme(text, "domain")).ring_spec();
		else
			throw ConfigError("domain", "unknown domain '" + text + "' (sb1, sb2, ds:<n>, cc:<n>, custom:<file>)");
		return d;
	}

	void validate_common(const ExperimentConfig &c)
	{
		if (c.p.empty())
			throw ConfigError("p", "at least one degree is required");
		for (int p : c.p)
			if (p < 0 || p > 20)
				throw ConfigError("p", "degree " + std::to_string(p) + " outside [0, 20]");
		if (c.levels < 0 || c.levels > 12)
			throw ConfigError("levels", "must lie in [0, 12]");
		if (c.threads < 0)
			throw ConfigError("threads", "must be non-negative");
		if (c.quad_order < 0 || c.quad_order > 64)
			throw ConfigError("quad_order", "must lie in [0, 64] (0 = automatic)");
		if (!(c.tol >= 0.0))
			throw ConfigError("tol", "must be non-negative");
	}

	/// Writes to the configured file, or stdout when none is set.
	template <typename Writer>
	void emit(const std::string &path, Writer write)
	{
		if (path.empty())
		{
			write(std::cout);
			std::cout.flush();
			return;
		}
		std::ofstream out(path, std::ios::binary);
		if (!out)
			throw ConfigError("output", "cannot open '" + path + "' for writing");
		write(out);
	}

	void add_experiment_options(CLI::App *sub, Overrides &o)
	{
		sub->add_option("--config", o.config, "JSON configuration file; flags override its fields");
		sub->add_option("--domain", o.flags.domain, "sb1, sb2, ds:<n>, cc:<n> or custom:<file>");
		sub->add_option("--p", o.flags.p, "Polynomial degrees, e.g. 2,3")->delimiter(',');
		sub->add_option("--output", o.flags.output, "Output file (default: stdout)");
		o.app = sub;
	}

	// ---------------------------------------------------------------------

	void cmd_convergence(const ExperimentConfig &c)
	{
		validate_common(c);
		const TargetFunction phi = parse_target(c.target, "target");
		int r = 0;
		const bool linf = c.norm == "linf";
		if (c.norm == "h1")
			r = 1;
		else if (c.norm == "h2")
			r = 2;
		else if (c.norm != "l2" && !linf)
			throw ConfigError("norm", "unknown norm '" + c.norm + "' (l2, h1, h2, linf)");
		if (linf && c.linf_grid < 2)
			throw ConfigError("linf_grid", "needs at least 2 points per direction");
		const CapKind cap = parse_cap_kind(c.cap, "cap");
		const Domain d = resolve_domain(c.domain);
		if (c.tensor_grid && !d.global)
			throw ConfigError("tensor_grid", "domain '" + c.domain + "' has no global map");

		// all meshes first, so configuration errors surface before any work
		std::vector<MeshLevel> meshes;
		for (int l = 0; l <= c.levels; ++l)
		{
			try
			{
				meshes.push_back(c.tensor_grid ? build_tensor_mesh(*d.global, d.ring.lambda, l)
											   : build_mesh(d.ring, l, cap));
			}
			catch (const CapUnavailableError &e)
			{
				throw ConfigError("cap", e.what());
			}
		}

		std::ostringstream csv;
		csv << "p,level,ring_index,error,log2_error,rate\n";
		for (int p : c.p)
		{
			std::optional<double> prev;
			for (const MeshLevel &mesh : meshes)
			{
				MeshErrorOptions opt;
				opt.p = p;
				opt.r = r;
				opt.quad_order = c.quad_order;
				opt.sector_only = c.sector_only;
				opt.threads = c.threads;
				opt.linf_grid = linf ? c.linf_grid : 0;
				const ErrorReport rep = mesh_error(phi, mesh, opt);

				auto row = [&](const std::string &index, double e, const std::string &rate) {
					csv << p << ',' << mesh.level << ',' << index << ',' << format_real(e) << ','
						<< format_real(std::log2(e)) << ',' << rate << '\n';
				};
				const auto &rings = linf ? rep.ring_linf : rep.ring_errors;
				for (std::size_t i = 0; i < rings.size(); ++i)
					row(std::to_string(i), rings[i], "");
				if (mesh.cap.kind != CapKind::Excluded)
					row("cap", linf ? rep.cap_linf : rep.cap_error, "");
				const double total = linf ? rep.linf : rep.total;
				std::string rate;
				if (prev && *prev > 0.0 && total > 0.0)
					rate = format_real(std::log2(*prev / total));
				row(linf ? "linf" : "total", total, rate);
				prev = total;
			}
		}
		emit(c.output, [&](std::ostream &out) { out << csv.str(); });
	}

	std::string monomial_name(const MonomialIndex &m)
	{
		if (m.alpha == 0 && m.beta == 0)
			return "1";
		std::string s;
		auto part = [&](char var, int e) {
			if (e == 0)
				return;
			if (!s.empty())
				s += '*';
			s += var;
			if (e > 1)
				s += '^' + std::to_string(e);
		};
		part('x', m.alpha);
		part('y', m.beta);
		return s;
	}

	void cmd_kappa(const ExperimentConfig &c)
	{
		validate_common(c);
		const Domain d = resolve_domain(c.domain);
		std::ostringstream out;
		auto report = [&](const std::string &label, const ElementMap &G, int p) {
			const ReproductionReport rep = c.exact ? reproduction_degree_exact(G, p) : reproduction_degree(G, p, c.tol);
			out << label << ": kappa = " << rep.kappa << (rep.cap_reached ? " (search cap p reached)" : "") << '\n';
			for (const DegreeFailures &f : rep.per_degree)
			{
				out << "  degree " << f.degree << ':';
				for (const MonomialIndex &m : monomials_of_degree(f.degree))
				{
					const bool failed = std::find(f.failing.begin(), f.failing.end(), m) != f.failing.end();
					out << ' ' << monomial_name(m) << (failed ? " fail" : " pass") << (m.beta == f.degree ? "" : ",");
				}
				out << '\n';
			}
			return rep.kappa;
		};
		for (int p : c.p)
		{
			out << "domain " << c.domain << ", p = " << p << ", "
				<< (c.exact ? std::string("exact arithmetic") : "tolerance " + format_real(c.tol)) << '\n';
			int kappa0 = -1;
			for (std::size_t n = 0; n < d.ring.elements.size(); ++n)
			{
				const int k = report("element " + std::to_string(n), d.ring.elements[n], p);
				kappa0 = kappa0 < 0 ? k : std::min(kappa0, k);
			}
			if (d.ring.global_map)
				report("cap (scaled global map)", *d.ring.global_map, p);
			for (std::size_t m = 0; m < d.ring.cap_pieces.size(); ++m)
				report("cap piece " + std::to_string(m), d.ring.cap_pieces[m], p);
			if (!c.exact)
				kappa0 = min_reproduction_degree(d.ring, p, c.tol); // also checks sub-cell inheritance
			out << "kappa0 = " << kappa0 << "\n\n";
		}
		emit(c.output, [&](std::ostream &o) { o << out.str(); });
	}

	void cmd_char_ring(const std::string &scheme, int samples, const std::string &output)
	{
		if (samples < 2)
			throw ConfigError("samples", "needs at least 2 points per edge");
		const auto ring = characteristic_ring(parse_scheme(scheme, "scheme"));
		const json j = characteristic_ring_to_json(ring, samples);
		emit(output, [&](std::ostream &out) { out << j.dump(2) << '\n'; });
	}

	void cmd_tables(bool csv, const std::string &output)
	{
		const auto tables = summary_tables();
		emit(output, [&](std::ostream &out) {
			if (csv)
				write_summary_csv(out, tables);
			else
				write_summary_tables(out, tables);
		});
	}

	void cmd_mesh(const ExperimentConfig &c, int level)
	{
		const Domain d = resolve_domain(c.domain);
		const CapKind cap = parse_cap_kind(c.cap, "cap");
		if (c.tensor_grid && !d.global)
			throw ConfigError("tensor_grid", "domain '" + c.domain + "' has no global map");
		MeshLevel mesh;
		try
		{
			mesh = c.tensor_grid ? build_tensor_mesh(*d.global, d.ring.lambda, level) : build_mesh(d.ring, level, cap);
		}
		catch (const CapUnavailableError &e)
		{
			throw ConfigError("cap", e.what());
		}
		emit(c.output, [&](std::ostream &out) { out << mesh_to_json(mesh).dump(2) << '\n'; });
	}
} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Best approximation on self-similar ring meshes of curved elements"};
	app.require_subcommand(1);

	Overrides conv, kap, msh;

	auto *convergence = app.add_subcommand("convergence", "Broken-norm best-approximation errors per level (CSV)");
	add_experiment_options(convergence, conv);
	convergence->add_option("--levels", conv.flags.levels, "Finest level l (levels 0..l are computed)");
	convergence->add_option("--target", conv.flags.target, "Target, e.g. x^2, x^2+y^2, cos(x)+sin(y+1)");
	convergence->add_option("--norm", conv.flags.norm, "l2, h1, h2 or linf");
	convergence->add_option("--cap", conv.flags.cap, "auto, scaled, coons or excluded");
	convergence->add_flag("--sector-only", conv.flags.sector_only, "Report only the domain's sector");
	convergence->add_option("--quad-order", conv.flags.quad_order, "Gauss points per direction (0 = automatic)");
	convergence->add_flag("--tensor-grid", conv.flags.tensor_grid, "Uniform tensor refinement of the global map");
	convergence->add_option("--threads", conv.flags.threads, "Worker threads (0 = all cores)");
	convergence->add_option("--linf-grid", conv.flags.linf_grid, "Sample grid per cell for --norm linf");

	auto *kappa = app.add_subcommand("kappa", "Reproduction degree per element and monomial");
	add_experiment_options(kappa, kap);
	kappa->add_option("--tol", kap.flags.tol, "Relative coefficient tolerance");
	kappa->add_flag("--exact", kap.flags.exact, "Decide membership in exact rational arithmetic");

	std::string scheme, ring_output;
	int samples = 17;
	auto *char_ring = app.add_subcommand("char-ring", "Characteristic ring of a subdivision scheme (JSON)");
	char_ring->add_option("scheme", scheme, "ds:<n> or cc:<n>")->required();
	char_ring->add_option("--samples", samples, "Polyline samples per patch edge");
	char_ring->add_option("--output", ring_output, "Output file (default: stdout)");

	bool tables_csv = false;
	std::string tables_output;
	auto *tables = app.add_subcommand("tables", "Best possible convergence rates (summary tables)");
	tables->add_flag("--csv", tables_csv, "Emit CSV instead of the fixed-format text");
	tables->add_option("--output", tables_output, "Output file (default: stdout)");

	int mesh_level = 0;
	auto *mesh = app.add_subcommand("mesh", "Cells and cap of one mesh level (JSON)");
	msh.app = mesh;
	mesh->add_option("--config", msh.config, "JSON configuration file; flags override its fields");
	mesh->add_option("--domain", msh.flags.domain, "sb1, sb2, ds:<n>, cc:<n> or custom:<file>");
	mesh->add_option("--level", mesh_level, "Mesh level");
	mesh->add_option("--cap", msh.flags.cap, "auto, scaled, coons or excluded");
	mesh->add_flag("--tensor-grid", msh.flags.tensor_grid, "Uniform tensor refinement of the global map");
	mesh->add_option("--output", msh.flags.output, "Output file (default: stdout)");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &e)
	{
		const int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}

	try
	{
		if (*convergence)
			cmd_convergence(conv.resolve());
		else if (*kappa)
			cmd_kappa(kap.resolve());
		else if (*char_ring)
			cmd_char_ring(scheme, samples, ring_output);
		else if (*tables)
			cmd_tables(tables_csv, tables_output);
		else if (*mesh)
		{
			if (mesh_level < 0 || mesh_level > 12)
				throw ConfigError("level", "must lie in [0, 12]");
			cmd_mesh(msh.resolve(), mesh_level);
		}
	}
	catch (const ConfigError &e)
	{
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	}
	catch (const UnsupportedValenceError &e)
	{
		std::cerr << "error: domain: " << e.what() << '\n';
		return 2;
	}
	catch (const CapUnavailableError &e)
	{
		std::cerr << "error: cap: " << e.what() << '\n';
		return 2;
	}
	catch (const NumericalError &e)
	{
		std::cerr << "numerical failure: " << e.what() << '\n';
		return 3;
	}
	catch (const std::exception &e)
	{
		std::cerr << "numerical failure: " << e.what() << '\n';
		return 3;
	}
	return 0;
}
