#pragma once

#include <stdexcept>
#include <string>

namespace punchcard {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bytes that do not decode to a canonical value of the expected type.
class InvalidEncoding : public Error {
public:
    using Error::Error;
};

class ZeroInverse : public Error {
public:
    ZeroInverse() : Error("inverse of zero scalar") {}
};

/// The server's proof of honest punching did not verify; the punch must be discarded.
class ProofRejected : public Error {
public:
    ProofRejected() : Error("punch proof rejected") {}
    using Error::Error;
};

class PromotionTooLarge : public Error {
public:
    using Error::Error;
};

class BadExpiry : public Error {
public:
    using Error::Error;
};

class NoSuchRedemption : public Error {
public:
    NoSuchRedemption() : Error("no recorded redemption for this secret") {}
};

/// I/O failure in a persistent store. Always distinct from a protocol reject.
class StorageError : public Error {
public:
    using Error::Error;
};

/// Persistent store contents fail integrity checks beyond a torn tail write.
class CorruptStore : public StorageError {
public:
    using StorageError::StorageError;
};

class TransportError : public Error {
public:
    using Error::Error;
};

/// The peer answered with an ERROR frame or an unexpected message.
class ProtocolError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class KeyStoreError : public Error {
public:
    using Error::Error;
};

/// Wallet misuse: unknown card, wrong scheme, spent card, count guard.
class WalletError : public Error {
public:
    using Error::Error;
};

}  // namespace punchcard
