#pragma once

#include <memory>
#include <type_traits>
#include <utility>

namespace ccr {

/// Heap cell with value semantics; lets recursive variants hold themselves.
template <class T>
class Box {
public:
    Box() : ptr_(std::make_unique<T>()) {}
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT: implicit by intent
    template <class U>
        requires(!std::is_same_v<std::remove_cvref_t<U>, Box> &&
                 !std::is_same_v<std::remove_cvref_t<U>, T> && std::is_constructible_v<T, U>)
    Box(U&& value) : ptr_(std::make_unique<T>(std::forward<U>(value)))  // NOLINT: implicit by intent
    {
    }
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other)
    {
        if (this != &other) *ptr_ = *other.ptr_;
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

}  // namespace ccr
