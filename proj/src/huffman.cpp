#include "csc/huffman.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "csc/bitio.hpp"
#include "csc/errors.hpp"

namespace csc {

namespace {

void put_varint(std::vector<unsigned char>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<unsigned char>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<unsigned char>(v));
}

std::uint64_t get_varint(const unsigned char* data, size_t size, size_t& pos) {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
        if (pos >= size) throw integrity_error("huffman block truncated (varint)");
        const unsigned char b = data[pos++];
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
        shift += 7;
        if (shift > 63) throw integrity_error("huffman block corrupt (varint overflow)");
    }
}

struct LengthEntry {
    std::uint64_t symbol;
    int length;
};

// Code lengths via the standard two-queue Huffman construction on
// frequency-sorted leaves.
std::vector<LengthEntry> code_lengths(const std::map<std::uint64_t, std::uint64_t>& freq) {
    struct Node {
        std::uint64_t weight;
        int left = -1, right = -1;
        std::uint64_t symbol = 0;
    };
    if (freq.empty()) return {};
    std::vector<Node> nodes;
    nodes.reserve(freq.size() * 2);
    using Item = std::pair<std::uint64_t, int>;  // (weight, node index); index ties keep determinism
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (const auto& [sym, count] : freq) {
        nodes.push_back({count, -1, -1, sym});
        heap.emplace(count, static_cast<int>(nodes.size()) - 1);
    }
    while (heap.size() > 1) {
        const auto [wa, ia] = heap.top();
        heap.pop();
        const auto [wb, ib] = heap.top();
        heap.pop();
        nodes.push_back({wa + wb, ia, ib, 0});
        heap.emplace(wa + wb, static_cast<int>(nodes.size()) - 1);
    }

    std::vector<LengthEntry> lengths;
    lengths.reserve(freq.size());
    if (freq.size() == 1) {
        lengths.push_back({nodes[0].symbol, 1});
        return lengths;
    }
    // Iterative depth traversal.
    std::vector<std::pair<int, int>> stack{{static_cast<int>(nodes.size()) - 1, 0}};
    while (!stack.empty()) {
        const auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& nd = nodes[idx];
        if (nd.left < 0) {
            lengths.push_back({nd.symbol, depth});
        } else {
            stack.emplace_back(nd.left, depth + 1);
            stack.emplace_back(nd.right, depth + 1);
        }
    }
    std::sort(lengths.begin(), lengths.end(), [](const LengthEntry& a, const LengthEntry& b) {
        return a.symbol < b.symbol;
    });
    return lengths;
}

// Canonical code assignment: sort by (length, symbol).
void assign_codes(std::vector<LengthEntry>& entries, std::vector<std::uint64_t>& codes) {
    std::vector<size_t> order(entries.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (entries[a].length != entries[b].length) return entries[a].length < entries[b].length;
        return entries[a].symbol < entries[b].symbol;
    });
    codes.assign(entries.size(), 0);
    std::uint64_t code = 0;
    int prev_len = 0;
    for (size_t rank = 0; rank < order.size(); ++rank) {
        const size_t i = order[rank];
        code <<= (entries[i].length - prev_len);
        codes[i] = code;
        ++code;
        prev_len = entries[i].length;
    }
}

}  // namespace

std::vector<unsigned char> huffman_encode(std::span<const std::uint64_t> symbols) {
    std::map<std::uint64_t, std::uint64_t> freq;
    for (std::uint64_t s : symbols) ++freq[s];

    std::vector<unsigned char> out;
    put_varint(out, freq.size());
    std::vector<LengthEntry> entries = code_lengths(freq);
    // entries are symbol-sorted; store delta-coded symbols with lengths.
    std::uint64_t prev = 0;
    for (size_t i = 0; i < entries.size(); ++i) {
        put_varint(out, entries[i].symbol - prev);
        prev = entries[i].symbol;
        out.push_back(static_cast<unsigned char>(entries[i].length));
    }
    put_varint(out, symbols.size());

    std::vector<std::uint64_t> codes;
    assign_codes(entries, codes);
    std::map<std::uint64_t, size_t> index;
    for (size_t i = 0; i < entries.size(); ++i) index[entries[i].symbol] = i;

    BitWriter bits;
    for (std::uint64_t s : symbols) {
        const size_t i = index[s];
        bits.put_bits(codes[i], entries[i].length);
    }
    put_varint(out, bits.bytes().size());
    const auto& payload = bits.bytes();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::vector<std::uint64_t> huffman_decode(const unsigned char* data, size_t size, size_t* consumed) {
    size_t pos = 0;
    const std::uint64_t n_entries = get_varint(data, size, pos);
    // Every table entry takes at least two bytes in the stream.
    if (n_entries > (size - pos) / 2) {
        throw integrity_error("huffman block corrupt (table count exceeds stream)");
    }
    std::vector<LengthEntry> entries;
    entries.reserve(n_entries);
    std::uint64_t sym = 0;
    for (std::uint64_t i = 0; i < n_entries; ++i) {
        sym += get_varint(data, size, pos);
        if (pos >= size) throw integrity_error("huffman block truncated (table)");
        const int len = data[pos++];
        if (len < 1 || len > 63) throw integrity_error("huffman block corrupt (code length)");
        entries.push_back({sym, len});
    }
    const std::uint64_t n_symbols = get_varint(data, size, pos);
    const std::uint64_t n_bytes = get_varint(data, size, pos);
    if (n_bytes > size - pos) throw integrity_error("huffman block truncated (bitstream)");
    // Each symbol consumes at least one bit.
    if (n_symbols > 8 * n_bytes) {
        throw integrity_error("huffman block corrupt (symbol count exceeds bitstream)");
    }

    std::vector<std::uint64_t> out;
    out.reserve(n_symbols);
    if (n_symbols == 0) {
        if (consumed) *consumed = pos + n_bytes;
        return out;
    }
    if (entries.empty()) throw integrity_error("huffman block corrupt (no table)");

    // Canonical decode tables: per length, the first code and the rank of its
    // first symbol in (length, symbol) order.
    std::vector<size_t> order(entries.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (entries[a].length != entries[b].length) return entries[a].length < entries[b].length;
        return entries[a].symbol < entries[b].symbol;
    });
    int max_len = 0;
    for (const auto& e : entries) max_len = std::max(max_len, e.length);
    std::vector<std::uint64_t> first_code(max_len + 2, 0);
    std::vector<std::uint64_t> first_rank(max_len + 2, 0);
    std::vector<std::uint64_t> count(max_len + 2, 0);
    for (const auto& e : entries) ++count[e.length];
    std::uint64_t code = 0, rank = 0;
    for (int len = 1; len <= max_len; ++len) {
        code <<= 1;
        first_code[len] = code;
        first_rank[len] = rank;
        code += count[len];
        rank += count[len];
    }

    BitReader bits(data + pos, n_bytes);
    for (std::uint64_t i = 0; i < n_symbols; ++i) {
        std::uint64_t c = 0;
        int len = 0;
        while (true) {
            c = (c << 1) | bits.get();
            ++len;
            if (len > max_len) throw integrity_error("huffman block corrupt (no such code)");
            if (count[len] > 0 && c < first_code[len] + count[len] && c >= first_code[len]) {
                const size_t r = first_rank[len] + (c - first_code[len]);
                out.push_back(entries[order[r]].symbol);
                break;
            }
        }
    }
    if (consumed) *consumed = pos + n_bytes;
    return out;
}

}  // namespace csc
