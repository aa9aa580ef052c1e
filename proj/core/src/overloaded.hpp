#ifndef PRIORID_SRC_OVERLOADED_HPP
#define PRIORID_SRC_OVERLOADED_HPP

namespace priorid::detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace priorid::detail

#endif // PRIORID_SRC_OVERLOADED_HPP
