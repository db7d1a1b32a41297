#include "csc/external_codec.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "csc/errors.hpp"
#include "csc/raw_io.hpp"

namespace csc {

namespace {

namespace fs = std::filesystem;

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path = fs::temp_directory_path() /
               ("csc_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + tag);
    }
    ~TempFile() {
        std::error_code ec;
        fs::remove(path, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
};

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    size_t at = 0;
    while ((at = tmpl.find(key, at)) != std::string::npos) {
        tmpl.replace(at, key.size(), value);
        at += value.size();
    }
    return tmpl;
}

std::string format_eb(double eb) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), eb);
    return std::string(buf, res.ptr);
}

struct CommandResult {
    int status = -1;
    std::string output;
};

CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) throw external_codec_error("cannot spawn command: " + command);
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        result.output.append(buf, got);
        if (result.output.size() > 65536) result.output.resize(65536);
    }
    const int wait_status = ::pclose(pipe);
    result.status = WIFEXITED(wait_status) ? WEXITSTATUS(wait_status) : wait_status;
    return result;
}

void run_template(const std::string& tmpl, const fs::path& input, const fs::path& output,
                  double eb) {
    if (tmpl.find("{input}") == std::string::npos || tmpl.find("{output}") == std::string::npos) {
        throw parameter_error("external codec template must contain {input} and {output}: " + tmpl);
    }
    std::string cmd = substitute(tmpl, "{input}", input.string());
    cmd = substitute(cmd, "{output}", output.string());
    cmd = substitute(cmd, "{eb}", format_eb(eb));
    const CommandResult res = run_command(cmd);
    if (res.status != 0) {
        throw external_codec_error("external codec command failed (status " +
                                   std::to_string(res.status) + "): " + cmd +
                                   (res.output.empty() ? "" : "\n" + res.output));
    }
    if (!fs::exists(output)) {
        throw external_codec_error("external codec produced no output file: " + cmd);
    }
}

}  // namespace

ExternalCodec::ExternalCodec(std::string name, std::string compress_template,
                             std::string decompress_template)
    : name_(std::move(name)),
      compress_template_(std::move(compress_template)),
      decompress_template_(std::move(decompress_template)) {}

std::vector<unsigned char> ExternalCodec::compress_payload(const Field2D& field, double eb,
                                                           const CodecOptions&) const {
    TempFile input("in.raw"), output("out.bin");
    save_raw_field(field, input.path.string());
    run_template(compress_template_, input.path, output.path, eb);
    std::ifstream in(output.path, std::ios::binary);
    if (!in) throw external_codec_error("cannot read external codec output");
    return std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
}

Field2D ExternalCodec::decompress_payload(const std::vector<unsigned char>& payload, int nx,
                                          int ny, double eb) const {
    TempFile input("in.bin"), output("out.raw");
    {
        std::ofstream out(input.path, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
        if (!out) throw external_codec_error("cannot stage external codec payload");
    }
    run_template(decompress_template_, input.path, output.path, eb);
    Field2D field;
    try {
        field = load_raw_field(output.path.string(), {ny, nx});
    } catch (const format_error& e) {
        throw external_codec_error(std::string("external codec output has the wrong size: ") +
                                   e.what());
    }
    field.field_id.clear();
    return field;
}

CodecRun run_codec_checked(const Codec& codec, const Field2D& field, double eb,
                           const CodecOptions& options) {
    CodecRun run = run_codec(codec, field, eb, options);
    if (!(run.record.max_abs_error <= eb)) {
        const std::string msg = "codec '" + codec.id() + "' violated the bound on field '" +
                                field.field_id + "': max |error| " +
                                std::to_string(run.record.max_abs_error) + " > eb " +
                                std::to_string(eb);
        if (codec.id().starts_with("external:")) throw external_codec_error(msg);
        throw integrity_error(msg);
    }
    return run;
}

}  // namespace csc
