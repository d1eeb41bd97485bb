#ifndef CDK_OVERLOADED_HPP
#define CDK_OVERLOADED_HPP

namespace cdk {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace cdk

#endif
