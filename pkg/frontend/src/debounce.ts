/**
 * Trailing-edge debounce: rapid calls collapse so `fn` fires at most once
 * per `wait` ms, with the latest arguments. `cancel` drops a pending call.
 */
export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  wait: number,
): Debounced<A> {
  let handle: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A) => {
    if (handle !== undefined) clearTimeout(handle);
    handle = setTimeout(() => {
      handle = undefined;
      fn(...args);
    }, wait);
  };
  wrapped.cancel = () => {
    if (handle !== undefined) clearTimeout(handle);
    handle = undefined;
  };
  return wrapped;
}
