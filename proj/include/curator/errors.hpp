#pragma once

#include <stdexcept>
#include <string>

namespace curator {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or inconsistent inputs detected before any work is done.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// A shard failed to load (bad checksum, malformed record).
class ShardError : public Error {
public:
    ShardError(std::string shard, const std::string& what)
        : Error(shard + ": " + what), shard_(std::move(shard)) {}

    const std::string& shard() const noexcept { return shard_; }

private:
    std::string shard_;
};

/// Content is not valid UTF-8; carries the offending document id.
class EncodingError : public Error {
public:
    EncodingError(std::string doc_id, const std::string& what)
        : Error(doc_id + ": " + what), doc_id_(std::move(doc_id)) {}

    const std::string& doc_id() const noexcept { return doc_id_; }

private:
    std::string doc_id_;
};

}  // namespace curator
