#include "flexi/analyzer.hpp"
#include "flexi/chain.hpp"
#include "flexi/layout.hpp"
#include "flexi/reorganizer.hpp"
#include "flexi/scenario.hpp"
#include "flexi/schema.hpp"
#include "flexi/store.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string location_kind(const flexi::VarLocation& loc) {
    if (std::holds_alternative<flexi::PackedLocation>(loc)) return "value";
    if (std::holds_alternative<flexi::FixedArrayLocation>(loc)) return "fixed_array";
    if (std::holds_alternative<flexi::DynArrayLocation>(loc)) return "dyn_array";
    return "mapping";
}

nlohmann::json location_json(const flexi::VarLocation& loc) {
    nlohmann::json j;
    j["kind"] = location_kind(loc);
    if (const auto* p = std::get_if<flexi::PackedLocation>(&loc)) {
        j["slot"] = p->slot.to_hex_trimmed();
        j["offset"] = p->byte_offset;
        j["size"] = p->size_bytes;
    } else if (const auto* fa = std::get_if<flexi::FixedArrayLocation>(&loc)) {
        j["slot"] = fa->base_slot.to_hex_trimmed();
        j["offset"] = 0;
        j["size"] = flexi::type_size_bytes(fa->element);
        j["length"] = fa->length;
    } else if (const auto* da = std::get_if<flexi::DynArrayLocation>(&loc)) {
        j["slot"] = da->header_slot.to_hex_trimmed();
        j["offset"] = 0;
        j["size"] = flexi::type_size_bytes(da->element);
        j["data_base"] = flexi::dyn_array_data_base(da->header_slot).to_hex();
    } else {
        const auto& m = std::get<flexi::MappingLocation>(loc);
        j["slot"] = m.header_slot.to_hex_trimmed();
        j["offset"] = 0;
        j["size"] = flexi::type_size_bytes(m.value);
    }
    return j;
}

int cmd_layout(const std::string& schema_path, const std::string& format) {
    flexi::ContractSchema schema;
    try {
        schema = flexi::parse_schema(read_file(schema_path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    flexi::StorageLayout layout = flexi::compute_layout(schema);

    if (format == "json") {
        nlohmann::json j;
        j["contract"] = schema.contract_name;
        j["slots_used_header"] = layout.slots_used_header;
        j["variables"] = nlohmann::json::array();
        for (const auto& var : schema.variables) {
            nlohmann::json vj = location_json(layout.at(var.name));
            vj["name"] = var.name;
            vj["type"] = flexi::var_type_token(var.var_type);
            j["variables"].push_back(std::move(vj));
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    std::cout << std::left << std::setw(16) << "name" << std::setw(12) << "kind" << std::setw(20)
              << "slot" << std::setw(8) << "offset" << std::setw(6) << "size"
              << "derived" << "\n";
    for (const auto& var : schema.variables) {
        const auto& loc = layout.at(var.name);
        nlohmann::json j = location_json(loc);
        std::string derived;
        if (const auto* da = std::get_if<flexi::DynArrayLocation>(&loc))
            derived = "data at " + flexi::dyn_array_data_base(da->header_slot).to_hex();
        else if (std::holds_alternative<flexi::MappingLocation>(loc))
            derived = "value at keccak256(key || p)";
        std::cout << std::left << std::setw(16) << var.name << std::setw(12)
                  << j["kind"].get<std::string>() << std::setw(20)
                  << j["slot"].get<std::string>() << std::setw(8) << j["offset"].get<unsigned>()
                  << std::setw(6) << j["size"].get<unsigned>() << derived << "\n";
    }
    return 0;
}

int cmd_diff(const std::string& old_path, const std::string& new_path,
             const std::string& plan_out) {
    flexi::MigrationPlan plan;
    try {
        flexi::ContractSchema old_schema = flexi::parse_schema(read_file(old_path));
        flexi::ContractSchema new_schema = flexi::parse_schema(read_file(new_path));
        new_schema.version = old_schema.version + 1;
        plan = flexi::diff_layouts(old_schema, new_schema);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    write_file(plan_out, plan.to_json() + "\n");
    for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";
    return plan.warnings.empty() ? 0 : 2;
}

int cmd_migrate(const std::string& snapshot_in, const std::string& plan_path,
                const std::string& snapshot_out) {
    try {
        std::string snapshot_text = read_file(snapshot_in);
        flexi::ContractStorage storage = flexi::ContractStorage::from_snapshot_json(snapshot_text);
        flexi::MigrationPlan plan = flexi::MigrationPlan::from_json(read_file(plan_path));

        // snapshots may carry the contract version; when present it is checked
        nlohmann::json snap = nlohmann::json::parse(snapshot_text);
        std::optional<std::uint32_t> version;
        if (snap.contains("version")) version = snap.at("version").get<std::uint32_t>();

        flexi::ApplyReport report = flexi::apply_plan(storage, plan, version);

        nlohmann::json out = nlohmann::json::parse(storage.to_snapshot_json());
        if (version) out["version"] = plan.to_version;
        write_file(snapshot_out, out.dump(2) + "\n");
        std::cout << report.to_json() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_simulate(const std::string& scenario_path) {
    try {
        flexi::ChainState chain;
        flexi::ScenarioReport report = flexi::run_scenario_file(scenario_path, chain);
        std::cout << report.to_json() << "\n";
        if (!report.passed) {
            for (const auto& a : report.assertions)
                if (!a.passed)
                    std::cerr << "failed: " << a.description << " (" << a.detail << ")\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FlexiContracts storage layout, migration and chain simulation tool"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string schema_path, format = "table";
    auto* layout = app.add_subcommand("layout", "print the storage layout of a schema");
    layout->add_option("schema", schema_path, "schema file")->required();
    layout->add_option("--format", format, "output format: table or json")
        ->check(CLI::IsMember({"table", "json"}));

    std::string old_path, new_path, plan_out;
    auto* diff = app.add_subcommand("diff", "diff two schemas into a migration plan");
    diff->add_option("old", old_path, "current schema file")->required();
    diff->add_option("new", new_path, "proposed schema file")->required();
    diff->add_option("plan_out", plan_out, "output plan file")->required();

    std::string snapshot_in, plan_path, snapshot_out;
    auto* migrate = app.add_subcommand("migrate", "apply a migration plan to a storage snapshot");
    migrate->add_option("snapshot", snapshot_in, "input snapshot file")->required();
    migrate->add_option("plan", plan_path, "plan file")->required();
    migrate->add_option("snapshot_out", snapshot_out, "output snapshot file")->required();

    std::string scenario_path;
    auto* simulate = app.add_subcommand("simulate", "run a chain scenario");
    simulate->add_option("scenario", scenario_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    if (layout->parsed()) return cmd_layout(schema_path, format);
    if (diff->parsed()) return cmd_diff(old_path, new_path, plan_out);
    if (migrate->parsed()) return cmd_migrate(snapshot_in, plan_path, snapshot_out);
    return cmd_simulate(scenario_path);
}
